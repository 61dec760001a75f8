//! Exact sampling of multi-channel fractional Brownian motion on a uniform
//! grid, Hölder-norm estimation, and path CSV I/O.
//!
//! Increments (fractional Gaussian noise) are drawn from their exact
//! Toeplitz covariance and cumulatively summed, so `B(0) = 0` holds exactly.

mod covariance;
mod holder;
mod io;
mod path;
mod refine;
mod sampler;

pub use covariance::{fbm_covariance, fgn_autocovariance};
pub use holder::{holder_norm, holder_norm_window};
pub use io::{fmt_f64, read_path, read_path_csv, write_path, write_path_csv, PathMetadata};
pub use path::FbmPath;
pub use refine::ConditionalRefiner;
pub use sampler::{sample_paths, FbmGenerator, SamplingMethod, MAX_CHOLESKY_STEPS};
