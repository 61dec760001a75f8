//! Embedded manifolds as weighted point clouds with tangent frames, and the
//! Hausdorff measure of their images under the flow via pushed-forward frames.

mod gram;
mod measure;
mod mesh;

pub use gram::{gram_hadamard_check, gram_volume, hadamard_majorant, hadamard_product};
pub use measure::{hausdorff_measure, measure_curve, MeasureCurve, Pushforward};
pub use mesh::{make_manifold, ManifoldMesh};
