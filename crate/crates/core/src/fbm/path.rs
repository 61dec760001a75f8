use crate::error::{Error, Result};
use crate::grid::TimeGrid;

use super::sampler::SamplingMethod;

/// Sampled values `B_γ(t_k)` for each channel γ, all starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath {
    pub(crate) grid: TimeGrid,
    pub(crate) hurst: f64,
    pub(crate) channels: Vec<Vec<f64>>,
    pub(crate) seed: u64,
    pub(crate) method: SamplingMethod,
}

impl FbmPath {
    /// Assemble a path from explicit values (e.g. read from disk or built in tests).
    pub fn from_values(
        grid: TimeGrid,
        hurst: f64,
        channels: Vec<Vec<f64>>,
        seed: u64,
        method: SamplingMethod,
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::domain("path needs at least one channel"));
        }
        for (c, ch) in channels.iter().enumerate() {
            if ch.len() != grid.len() {
                return Err(Error::domain(format!(
                    "channel {c} has {} values, grid has {} nodes",
                    ch.len(),
                    grid.len()
                )));
            }
            if ch[0] != 0.0 {
                return Err(Error::domain(format!("channel {c} does not start at 0")));
            }
            if ch.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("channel {c} has non-finite values")));
            }
        }
        Ok(Self {
            grid,
            hurst,
            channels,
            seed,
            method,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn method(&self) -> SamplingMethod {
        self.method
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    /// `B_c(t_{k+1}) − B_c(t_k)`.
    #[inline]
    pub fn increment(&self, c: usize, k: usize) -> f64 {
        self.channels[c][k + 1] - self.channels[c][k]
    }

    /// Grid estimate of `‖B_c‖_{β,T}` over the whole horizon.
    pub fn holder_norm(&self, c: usize, beta: f64) -> Result<f64> {
        super::holder_norm(self.grid.step(), &[self.channel(c)], beta, 0..self.grid.len())
    }

    /// Every `factor`-th node; the result lives on a grid with `N / factor` steps.
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.grid.steps().is_multiple_of(factor) {
            return Err(Error::domain(format!(
                "coarsening factor {factor} does not divide {} steps",
                self.grid.steps()
            )));
        }
        let grid = TimeGrid::new(self.grid.horizon(), self.grid.steps() / factor)?;
        let channels = self
            .channels
            .iter()
            .map(|ch| ch.iter().step_by(factor).copied().collect())
            .collect();
        Ok(Self {
            grid,
            channels,
            ..self.clone()
        })
    }
}
