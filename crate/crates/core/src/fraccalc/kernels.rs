//! Left-sided product-integration kernels on a uniform grid `x_k = a + k h`.
//! Both are exact for piecewise-linear data.

use crate::special::gamma;

/// `I^α_{a+} f` at every node (product trapezoid rule).
pub(crate) fn left_integral(values: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    let n = values.len();
    let p = alpha + 1.0;
    let pw: Vec<f64> = (0..=n).map(|m| (m as f64).powf(p)).collect();
    // interior weight at distance d = k − j
    let w: Vec<f64> = (0..n)
        .map(|d| if d == 0 { 1.0 } else { pw[d + 1] - 2.0 * pw[d] + pw[d - 1] })
        .collect();
    let scale = h.powf(alpha) / gamma(alpha + 2.0);
    let mut out = vec![0.0; n];
    for k in 1..n {
        let kf = k as f64;
        let w0 = pw[k - 1] - (kf - alpha - 1.0) * kf.powf(alpha);
        let mut s = w0 * values[0];
        for j in 1..=k {
            s += w[k - j] * values[j];
        }
        out[k] = scale * s;
    }
    out
}

/// `D^α_{a+} f` at every node from
/// `Γ(1−α)⁻¹ [f(x)/(x−a)^α + α ∫_a^x (f(x) − f(y))/(x − y)^{1+α} dy]`,
/// with the singular integral done by product integration against the
/// piecewise-linear interpolant. The value at `x = a` is 0 (indicator of `(a, b)`).
pub(crate) fn left_derivative(values: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    let n = values.len();
    // A_i = ∫_i^{i+1} u^{-1-α} du,  B_i = ∫_i^{i+1} (u − i) u^{-1-α} du   (unit spacing)
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    b[0] = 1.0 / (1.0 - alpha);
    for i in 1..n {
        let fi = i as f64;
        a[i] = (fi.powf(-alpha) - (fi + 1.0).powf(-alpha)) / alpha;
        b[i] = ((fi + 1.0).powf(1.0 - alpha) - fi.powf(1.0 - alpha)) / (1.0 - alpha) - fi * a[i];
    }
    let c = 1.0 / gamma(1.0 - alpha);
    let ha = h.powf(-alpha);
    let mut out = vec![0.0; n];
    for k in 1..n {
        let fk = values[k];
        let mut s = (fk - values[k - 1]) * b[0];
        for i in 1..k {
            // cell [x_{k-i-1}, x_{k-i}]
            let near = values[k - i];
            let far = values[k - i - 1];
            s += (fk - near) * a[i] + (near - far) * b[i];
        }
        out[k] = c * (fk * (k as f64 * h).powf(-alpha) + alpha * ha * s);
    }
    out
}

/// Leading power term `c (x − a)^θ` of `f − f(a)` near `a`.
///
/// Fitted on nodes 1 and 2, accepted only when node 4 confirms the model to
/// 1% and the term stays comparable to the data over the whole interval.
/// Returned as `(c, θ)` in absolute units.
pub(crate) fn leading_power(values: &[f64], h: f64) -> Option<(f64, f64)> {
    if values.len() < 5 {
        return None;
    }
    let f0 = values[0];
    let r1 = values[1] - f0;
    let r2 = values[2] - f0;
    let r4 = values[4] - f0;
    if r1 == 0.0 || !(r2 / r1 > 0.0) {
        return None;
    }
    let theta = (r2 / r1).log2();
    if !(theta > 0.0 && theta <= 3.0) || (theta - 1.0).abs() < 1e-6 {
        return None;
    }
    let pred4 = r1 * 4f64.powf(theta);
    if (pred4 - r4).abs() > 1e-2 * r4.abs() {
        return None;
    }
    let coef = r1 / h.powf(theta);
    let span = (values.len() - 1) as f64 * h;
    let max_data = values.iter().map(|v| (v - f0).abs()).fold(0.0, f64::max);
    if (coef * span.powf(theta)).abs() > 10.0 * max_data {
        return None;
    }
    Some((coef, theta))
}
