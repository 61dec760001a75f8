use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::covariance::fgn_autocovariance;
use super::path::FbmPath;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::Cholesky;
use crate::rng::channel_rng;

/// Largest step count accepted by the Cholesky generator.
pub const MAX_CHOLESKY_STEPS: usize = 4096;

/// Relative tolerance for negative circulant eigenvalues.
const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMethod {
    #[default]
    Cholesky,
    Circulant,
}

impl fmt::Display for SamplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMethod::Cholesky => "cholesky",
            SamplingMethod::Circulant => "circulant",
        })
    }
}

impl FromStr for SamplingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cholesky" => Ok(Self::Cholesky),
            "circulant" => Ok(Self::Circulant),
            other => Err(Error::spec(other, "expected `cholesky` or `circulant`")),
        }
    }
}

enum Kernel {
    Cholesky(Cholesky),
    Circulant {
        /// `sqrt(λ_k / M)` for the 2N-point embedding.
        scale: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
}

/// Reusable generator for one `(grid, H, method)` triple. Factorization
/// happens once; sampling is then `O(N²)` (Cholesky) or `O(N log N)` (circulant).
pub struct FbmGenerator {
    grid: TimeGrid,
    hurst: f64,
    method: SamplingMethod,
    kernel: Kernel,
}

impl fmt::Debug for FbmGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FbmGenerator")
            .field("grid", &self.grid)
            .field("hurst", &self.hurst)
            .field("method", &self.method)
            .finish()
    }
}

impl FbmGenerator {
    pub fn new(grid: TimeGrid, hurst: f64, method: SamplingMethod) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::domain(format!("Hurst parameter must lie in (0,1), got {hurst}")));
        }
        let n = grid.steps();
        let var = grid.step().powf(2.0 * hurst);
        let kernel = match method {
            SamplingMethod::Cholesky => {
                if n > MAX_CHOLESKY_STEPS {
                    return Err(Error::domain(format!(
                        "cholesky sampling is limited to {MAX_CHOLESKY_STEPS} steps (got {n}); use circulant"
                    )));
                }
                let acov: Vec<f64> = (0..n).map(|k| var * fgn_autocovariance(k, hurst)).collect();
                let mut cov = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..=i {
                        cov[i * n + j] = acov[i - j];
                        cov[j * n + i] = acov[i - j];
                    }
                }
                Kernel::Cholesky(Cholesky::factor(n, &cov)?)
            }
            SamplingMethod::Circulant => {
                let m = 2 * n;
                let mut row: Vec<Complex<f64>> = (0..m)
                    .map(|j| {
                        let lag = if j <= n { j } else { m - j };
                        Complex::new(var * fgn_autocovariance(lag, hurst), 0.0)
                    })
                    .collect();
                let fft = FftPlanner::new().plan_fft_forward(m);
                fft.process(&mut row);
                let max = row.iter().map(|c| c.re).fold(0.0, f64::max);
                let mut scale = Vec::with_capacity(m);
                for (k, c) in row.iter().enumerate() {
                    let mut lambda = c.re;
                    if lambda < 0.0 {
                        if lambda < -EIGEN_TOL * max {
                            return Err(Error::NegativeEigenvalue { index: k, value: lambda });
                        }
                        lambda = 0.0;
                    }
                    scale.push((lambda / m as f64).sqrt());
                }
                Kernel::Circulant { scale, fft }
            }
        };
        Ok(Self {
            grid,
            hurst,
            method,
            kernel,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn method(&self) -> SamplingMethod {
        self.method
    }

    /// Draw `channel_count` independent channels; channel `c` uses stream `seed ^ c`.
    pub fn sample(&self, channel_count: usize, seed: u64) -> Result<FbmPath> {
        if channel_count == 0 {
            return Err(Error::domain("channel_count must be >= 1"));
        }
        let channels = (0..channel_count)
            .map(|c| self.sample_channel(seed, c))
            .collect();
        Ok(FbmPath {
            grid: self.grid,
            hurst: self.hurst,
            channels,
            seed,
            method: self.method,
        })
    }

    fn sample_channel(&self, seed: u64, channel: usize) -> Vec<f64> {
        let n = self.grid.steps();
        let mut rng = channel_rng(seed, channel);
        let increments = match &self.kernel {
            Kernel::Cholesky(ch) => {
                let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let mut x = vec![0.0; n];
                ch.mul_lower(&z, &mut x);
                x
            }
            Kernel::Circulant { scale, fft } => {
                let mut w: Vec<Complex<f64>> = scale
                    .iter()
                    .map(|s| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut w);
                w[..n].iter().map(|c| c.re).collect()
            }
        };
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for dx in increments {
            acc += dx;
            values.push(acc);
        }
        values
    }

    /// Covariance matrix of the increments implied by the generator (`L Lᵀ`).
    /// Only available for the Cholesky method.
    pub fn implied_increment_covariance(&self) -> Option<Vec<f64>> {
        let Kernel::Cholesky(ch) = &self.kernel else {
            return None;
        };
        let n = ch.dim();
        let l = ch.lower();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s = crate::linalg::dot(&l[i * n..i * n + j + 1], &l[j * n..j * n + j + 1]);
                out[i * n + j] = s;
                out[j * n + i] = s;
            }
        }
        Some(out)
    }
}

/// One-shot convenience wrapper around [`FbmGenerator`].
pub fn sample_paths(
    grid: TimeGrid,
    hurst: f64,
    channel_count: usize,
    seed: u64,
    method: SamplingMethod,
) -> Result<FbmPath> {
    FbmGenerator::new(grid, hurst, method)?.sample(channel_count, seed)
}
