use super::exponent::holder_exponent;
use super::function::{FracOrder, SampledFunction, Side};
use super::kernels::{leading_power, left_derivative, left_integral};
use crate::error::{Error, Result};
use crate::special::gamma;

fn reflect(v: &[f64]) -> Vec<f64> {
    v.iter().rev().copied().collect()
}

/// Applies a left-sided operator, or its reflection for the right side.
fn sided(values: &[f64], side: Side, op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    match side {
        Side::Left => op(values),
        Side::Right => reflect(&op(&reflect(values))),
    }
}

/// Splits off a detected leading power `c (x−a)^θ`, applies `numeric` to the
/// remainder and adds `analytic(c, θ, x − a)` for the power term.
fn with_power_split(
    values: &[f64],
    h: f64,
    numeric: impl Fn(&[f64]) -> Vec<f64>,
    analytic: impl Fn(f64, f64, f64) -> f64,
) -> Vec<f64> {
    match leading_power(values, h) {
        None => numeric(values),
        Some((c, theta)) => {
            let rest: Vec<f64> = values
                .iter()
                .enumerate()
                .map(|(k, v)| v - c * (k as f64 * h).powf(theta))
                .collect();
            let mut out = numeric(&rest);
            for (k, o) in out.iter_mut().enumerate().skip(1) {
                *o += analytic(c, theta, k as f64 * h);
            }
            out
        }
    }
}

/// Riemann–Liouville fractional integral of order `α > 0`.
///
/// Left: `(I^α_{a+} f)(x) = Γ(α)⁻¹ ∫_a^x (x−y)^{α−1} f(y) dy`.
/// Right (real magnitude): `Γ(α)⁻¹ ∫_x^b (y−x)^{α−1} f(y) dy`.
pub fn rl_integral(f: &SampledFunction, order: FracOrder) -> Result<SampledFunction> {
    let alpha = order.alpha;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("integral order must be positive, got {alpha}")));
    }
    let h = f.step();
    let out = sided(f.values(), order.side, |v| {
        with_power_split(
            v,
            h,
            |r| left_integral(r, h, alpha),
            |c, th, x| c * gamma(1.0 + th) / gamma(1.0 + th + alpha) * x.powf(th + alpha),
        )
    });
    Ok(f.with_values(out))
}

/// Weyl (Riemann–Liouville) derivative of order `α ∈ (0,1)`.
///
/// Logs a warning when the estimated Hölder exponent of `f` does not exceed `α`.
pub fn weyl_derivative(f: &SampledFunction, order: FracOrder) -> Result<SampledFunction> {
    let alpha = order.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("derivative order must lie in (0,1), got {alpha}")));
    }
    let lambda = holder_exponent(f.values());
    if lambda <= alpha {
        log::warn!(
            "estimated Hölder exponent {lambda:.3} <= derivative order {alpha}; result may diverge"
        );
    }
    let h = f.step();
    let out = sided(f.values(), order.side, |v| {
        with_power_split(
            v,
            h,
            |r| left_derivative(r, h, alpha),
            |c, th, x| c * gamma(1.0 + th) / gamma(1.0 + th - alpha) * x.powf(th - alpha),
        )
    });
    Ok(f.with_values(out))
}
