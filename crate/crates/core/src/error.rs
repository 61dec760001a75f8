use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the numerics and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("covariance matrix is not numerically positive definite: pivot {pivot} = {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("circulant embedding has negative eigenvalue {value:e} at index {index}")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },

    #[error("integral undefined: Hölder exponents {lambda:.3} + {mu:.3} <= 1")]
    YoungCondition { lambda: f64, mu: f64 },

    #[error("bisection for the interval size did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },

    #[error("gram/hadamard majorization violated at point {point}: volume {volume:e} > {bound:e}")]
    Majorization {
        point: usize,
        volume: f64,
        bound: f64,
    },

    #[error("invalid spec `{spec}`: {reason}")]
    Spec { spec: String, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("every replication failed; first error: {0}")]
    AllFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn spec(spec: &str, reason: impl Into<String>) -> Self {
        Error::Spec {
            spec: spec.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
