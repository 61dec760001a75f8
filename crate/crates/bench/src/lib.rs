//! Shared fixtures for the `kernels` benchmarks.

use fbflow_core::fbm::{sample_paths, FbmPath, SamplingMethod};
use fbflow_core::flow::VectorFieldSet;
use fbflow_core::TimeGrid;

/// A two-channel Cholesky path on `[0, 1]` with `steps` increments.
pub fn path(steps: usize, hurst: f64) -> FbmPath {
    let grid = TimeGrid::new(1.0, steps).expect("grid");
    sample_paths(grid, hurst, 2, 1, SamplingMethod::Cholesky).expect("path")
}

pub fn sine() -> VectorFieldSet {
    VectorFieldSet::parse("sine").expect("preset")
}
