use rand_distr::{Distribution, StandardNormal};

use super::covariance::covariance_unchecked;
use super::path::FbmPath;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::Cholesky;
use crate::rng::channel_rng;

/// Exact conditional refinement: samples the values at the new nodes of a
/// `factor`-fold refined grid from their Gaussian law given the coarse nodes.
/// The refined path agrees with the coarse one at every coarse node.
#[derive(Debug)]
pub struct ConditionalRefiner {
    coarse: TimeGrid,
    fine: TimeGrid,
    hurst: f64,
    factor: usize,
    /// Row-major `U × N` matrix `Σ_uc Σ_cc⁻¹` mapping coarse values to conditional means.
    gain: Vec<f64>,
    /// Cholesky factor of the conditional covariance of the `U` new nodes.
    cond: Cholesky,
}

impl ConditionalRefiner {
    pub fn new(coarse: TimeGrid, hurst: f64, factor: usize) -> Result<Self> {
        if factor < 2 {
            return Err(Error::domain("refinement factor must be >= 2"));
        }
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::domain(format!("Hurst parameter must lie in (0,1), got {hurst}")));
        }
        let fine = coarse.refined(factor)?;
        let n = coarse.steps();
        let known: Vec<f64> = (1..=n).map(|i| coarse.time(i)).collect();
        let unknown: Vec<f64> = (1..=fine.steps())
            .filter(|j| j % factor != 0)
            .map(|j| fine.time(j))
            .collect();
        let u = unknown.len();
        let cov = |a: f64, b: f64| covariance_unchecked(a, b, hurst);

        let mut cc = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                cc[i * n + j] = cov(known[i], known[j]);
            }
        }
        let cc = Cholesky::factor(n, &cc)?;

        // gain row r solves Σ_cc g = Σ_c,u[r]
        let mut gain = vec![0.0; u * n];
        for (r, &tu) in unknown.iter().enumerate() {
            let row = &mut gain[r * n..(r + 1) * n];
            for (i, &tk) in known.iter().enumerate() {
                row[i] = cov(tu, tk);
            }
            cc.solve(row);
        }

        let mut cond = vec![0.0; u * u];
        for r in 0..u {
            for s in 0..=r {
                let mut v = cov(unknown[r], unknown[s]);
                for (i, &tk) in known.iter().enumerate() {
                    v -= gain[r * n + i] * cov(tk, unknown[s]);
                }
                cond[r * u + s] = v;
                cond[s * u + r] = v;
            }
        }
        let cond = Cholesky::factor(u, &cond)?;
        Ok(Self {
            coarse,
            fine,
            hurst,
            factor,
            gain,
            cond,
        })
    }

    pub fn fine_grid(&self) -> &TimeGrid {
        &self.fine
    }

    /// Refine every channel of `path`; channel `c` uses stream `seed ^ c`.
    pub fn refine(&self, path: &FbmPath, seed: u64) -> Result<FbmPath> {
        if path.grid != self.coarse || (path.hurst - self.hurst).abs() > 0.0 {
            return Err(Error::domain("path grid or Hurst parameter differs from the refiner's"));
        }
        let n = self.coarse.steps();
        let u = self.cond.dim();
        let mut channels = Vec::with_capacity(path.channel_count());
        for (c, coarse) in path.channels.iter().enumerate() {
            let mut rng = channel_rng(seed, c);
            let z: Vec<f64> = (0..u).map(|_| StandardNormal.sample(&mut rng)).collect();
            let mut noise = vec![0.0; u];
            self.cond.mul_lower(&z, &mut noise);
            let x = &coarse[1..];
            let mut fine = Vec::with_capacity(self.fine.len());
            fine.push(0.0);
            let mut r = 0;
            for j in 1..=self.fine.steps() {
                if j % self.factor == 0 {
                    fine.push(coarse[j / self.factor]);
                } else {
                    let mean = crate::linalg::dot(&self.gain[r * n..(r + 1) * n], x);
                    fine.push(mean + noise[r]);
                    r += 1;
                }
            }
            channels.push(fine);
        }
        Ok(FbmPath {
            grid: self.fine,
            hurst: self.hurst,
            channels,
            seed: path.seed,
            method: path.method,
        })
    }
}
