//! Riemann–Liouville integrals, Weyl derivatives, the generalized Stieltjes
//! (Zähle) integral and the `W^{1−α,∞}` norm on uniformly sampled functions.
//!
//! All operators work in real arithmetic. Right-sided operators use the
//! real-magnitude convention: they are the left-sided operators applied to
//! the reflection `x ↦ a + b − x`. The complex phases `(−1)^{±α}` collapse to
//! a single sign in the Stieltjes integral, applied there explicitly.

mod exponent;
mod function;
mod kernels;
mod ops;
mod stieltjes;
mod wnorm;

pub use exponent::holder_exponent;
pub use function::{FracOrder, SampledFunction, Side};
pub use ops::{rl_integral, weyl_derivative};
pub use stieltjes::zahle_integral;
pub use wnorm::{w_norm, WNormConvention};
