//! The explicit constant chain behind the growth bounds: exponents, the
//! interval size Δ, the per-interval factor S, and the resulting tangent and
//! Hausdorff-measure bounds, plus pathwise checks of the intermediate
//! estimates.

mod checks;
mod constants;
mod params;

pub use checks::{
    flow_holder_check, flow_singular_integral, lemma_check, moment_shape, sample_moments, MomentShape, WindowReport,
};
pub use constants::{
    compute_constants, constants_from_parts, hausdorff_growth_bound, solve_delta, tangent_growth_bound,
    BoundConstants, BoundOptions, DeltaMode, DeltaSolution, GrowthBound,
};
pub use params::{default_params, HolderParams};
