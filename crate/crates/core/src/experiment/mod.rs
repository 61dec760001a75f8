//! Monte Carlo verification of the growth bounds: TOML configuration,
//! a deterministic parallel runner, the CSV report and the self-test.

mod config;
mod report;
mod run;
mod selftest;

pub use config::{BoundsSection, ExperimentConfig, ExperimentSection, ManifoldSection, OutputSection, ResolvedExperiment};
pub use report::{BoundReport, BoundRow, RowValues, Summary};
pub use run::{replicate, run_bound_experiment};
pub use selftest::{selftest, PropertyResult, SelftestOptions};
