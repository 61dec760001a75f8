use super::exponent::holder_exponent;
use super::function::{FracOrder, SampledFunction};
use super::ops::weyl_derivative;
use crate::error::{Error, Result};

/// Generalized Stieltjes integral `∫_a^b f dg` on the common grid of `f` and `g`:
///
/// `(−1)^α ∫ D^α_{a+} f_{a+} · D^{1−α}_{b−} g_{b−} dx + f(a) (g(b) − g(a))`,
///
/// where the phases of the two operators multiply to −1 under the
/// real-magnitude convention, and the last term restores `∫ f dg` from
/// `∫ f_{a+} dg`. The outer integral is a trapezoid rule on the nodes.
pub fn zahle_integral(f: &SampledFunction, g: &SampledFunction, alpha: f64) -> Result<f64> {
    if f.len() != g.len() || f.a() != g.a() || f.b() != g.b() {
        return Err(Error::domain("integrand and integrator must share a grid"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("α must lie in (0,1), got {alpha}")));
    }
    let lambda = holder_exponent(f.values());
    let mu = holder_exponent(g.values());
    if lambda + mu <= 1.0 {
        return Err(Error::YoungCondition { lambda, mu });
    }
    if alpha >= lambda || 1.0 - alpha >= mu {
        log::warn!("α = {alpha} is not admissible for estimated exponents λ = {lambda:.3}, μ = {mu:.3}");
    }
    let fa = f.values()[0];
    let gb = *g.values().last().expect("non-empty");
    let f_centered = f.with_values(f.values().iter().map(|v| v - fa).collect());
    let g_centered = g.with_values(g.values().iter().map(|v| v - gb).collect());
    let df = weyl_derivative(&f_centered, FracOrder::left(alpha))?;
    let dg = weyl_derivative(&g_centered, FracOrder::right(1.0 - alpha))?;
    let prod: Vec<f64> = df.values().iter().zip(dg.values()).map(|(a, b)| a * b).collect();
    let n = prod.len() - 1;
    let inner = f.step() * (0.5 * (prod[0] + prod[n]) + prod[1..n].iter().sum::<f64>());
    Ok(-inner + fa * (gb - g.values()[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{sample_paths, SamplingMethod};
    use crate::grid::TimeGrid;

    const N: usize = 2048;

    fn sampled(f: impl Fn(f64) -> f64) -> SampledFunction {
        SampledFunction::from_fn(0.0, 1.0, N, f).unwrap()
    }

    /// Trapezoid Riemann–Stieltjes sum.
    fn rs_sum(f: &[f64], g: &[f64]) -> f64 {
        (0..f.len() - 1).map(|k| 0.5 * (f[k] + f[k + 1]) * (g[k + 1] - g[k])).sum()
    }

    #[test]
    fn constant_integrand() {
        let one = sampled(|_| 1.0);
        let g = sampled(|x| (3.0 * x).cos());
        let v = zahle_integral(&one, &g, 0.3).unwrap();
        assert!((v - ((3.0f64).cos() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn x_dx_squared() {
        let f = sampled(|x| x);
        let g = sampled(|x| x * x);
        let vals: Vec<f64> = [0.2, 0.3, 0.4].iter().map(|&a| zahle_integral(&f, &g, a).unwrap()).collect();
        for v in &vals {
            assert!((v / (2.0 / 3.0) - 1.0).abs() < 1e-3, "{v}");
        }
        let spread = vals.iter().fold(f64::MIN, |m, v| m.max(*v)) - vals.iter().fold(f64::MAX, |m, v| m.min(*v));
        assert!(spread / (2.0 / 3.0) < 2e-3);
    }

    #[test]
    fn self_integral() {
        let g = sampled(|x| 1.0 + x.sin());
        let want = (g.values()[N].powi(2) - 1.0) / 2.0;
        let v = zahle_integral(&g, &g, 0.35).unwrap();
        assert!((v / want - 1.0).abs() < 1e-3, "{v} vs {want}");
    }

    #[test]
    fn matches_riemann_stieltjes_on_holder_paths() {
        let grid = TimeGrid::new(1.0, N).unwrap();
        let p = sample_paths(grid, 0.8, 2, 17, SamplingMethod::Cholesky).unwrap();
        let f = SampledFunction::new(0.0, 1.0, p.channel(0).iter().map(|x| x + 1.0).collect()).unwrap();
        let g = SampledFunction::new(0.0, 1.0, p.channel(1).to_vec()).unwrap();
        let want = rs_sum(f.values(), g.values());
        for alpha in [0.3, 0.4, 0.5] {
            let v = zahle_integral(&f, &g, alpha).unwrap();
            assert!((v - want).abs() / want.abs() < 1e-3, "α={alpha}: {v} vs {want}");
        }
    }

    #[test]
    fn rejects_rough_pair() {
        let rough: Vec<f64> = (0..=N).map(|k| ((k * k) as f64 * 0.7).sin()).collect();
        let f = SampledFunction::new(0.0, 1.0, rough.clone()).unwrap();
        assert!(matches!(zahle_integral(&f, &f, 0.5), Err(Error::YoungCondition { .. })));
    }
}
