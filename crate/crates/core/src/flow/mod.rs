//! Driving vector fields with closed-form constants, and the pathwise Euler
//! scheme for the flow `dx = Σ_γ U_γ(x) dB_γ` and its Jacobian.

mod field;
mod solver;

pub use field::{preset_spec, FieldConstants, FieldKind, VectorFieldSet};
pub use solver::{
    integrate_flow, integrate_joint, integrate_tangent, refine_path, EulerStepper, FlowTrajectory,
    TangentTrajectory,
};
