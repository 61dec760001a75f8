use super::constants::BoundConstants;
use crate::error::{Error, Result};
use crate::fbm::holder_norm;
use crate::flow::FlowTrajectory;

/// Outcome of a per-window inequality check along one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowReport {
    pub windows: usize,
    pub cells_per_window: usize,
    pub violations: usize,
    /// Largest `left side / right side` over all windows.
    pub max_ratio: f64,
}

fn window_cells(traj: &FlowTrajectory, c: &BoundConstants) -> Result<usize> {
    let h = traj.grid().step();
    let delta = c.delta.min(traj.grid().horizon());
    let cells = (delta / h * (1.0 + 1e-12)).floor() as usize;
    if cells == 0 {
        return Err(Error::domain(format!(
            "grid too coarse: Δ = {delta:e} is shorter than one step h = {h:e}"
        )));
    }
    Ok(cells)
}

fn windows(steps: usize, cells: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..steps).step_by(cells).map(move |s| (s, (s + cells).min(steps)))
}

/// `∫_s^t ‖x_t − x_r‖₂ / (t − r)^{1+α} dr` by product integration against the
/// piecewise-linear interpolant of `r ↦ ‖x_t − x_r‖₂` (zero at `r = t`).
pub fn flow_singular_integral(traj: &FlowTrajectory, s: usize, t: usize, alpha: f64) -> f64 {
    let h = traj.grid().step();
    let xt = traj.state(t);
    let dist = |k: usize| -> f64 {
        traj.state(k)
            .iter()
            .zip(xt)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let len = t - s;
    let mut total = 0.0;
    let mut d_prev = 0.0;
    for m in 0..len {
        // cell u ∈ [m, m+1] in units of h, u = t − r
        let d_next = dist(t - m - 1);
        if m == 0 {
            total += d_next / (1.0 - alpha);
        } else {
            let mf = m as f64;
            let p = (mf.powf(-alpha) - (mf + 1.0).powf(-alpha)) / alpha;
            let q = ((mf + 1.0).powf(1.0 - alpha) - mf.powf(1.0 - alpha)) / (1.0 - alpha);
            total += d_prev * p + (d_next - d_prev) * (q - mf * p);
        }
        d_prev = d_next;
    }
    total * h.powf(-alpha)
}

/// Flow estimate on every Δ-window `[s, t]`:
/// `∫_s^t ‖x_t − x_r‖₂/(t − r)^{1+α} dr ≤ K* (t − s)^{β−α}`.
pub fn lemma_check(traj: &FlowTrajectory, c: &BoundConstants) -> Result<WindowReport> {
    let cells = window_cells(traj, c)?;
    let (a, b) = (c.params.alpha(), c.params.beta());
    let h = traj.grid().step();
    let mut rep = WindowReport {
        windows: 0,
        cells_per_window: cells,
        violations: 0,
        max_ratio: 0.0,
    };
    for (s, t) in windows(traj.grid().steps(), cells) {
        let lhs = flow_singular_integral(traj, s, t, a);
        let rhs = c.kstar * (((t - s) as f64) * h).powf(b - a);
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        rep.windows += 1;
        rep.max_ratio = rep.max_ratio.max(ratio);
        if ratio > 1.0 {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// Grid Hölder norm of the flow on every Δ-window:
/// `‖x‖_{s,t,1−α} ≤ K_Δ (t − s)^{α+β−1}`.
pub fn flow_holder_check(traj: &FlowTrajectory, c: &BoundConstants) -> Result<WindowReport> {
    let cells = window_cells(traj, c)?;
    let (a, b) = (c.params.alpha(), c.params.beta());
    let h = traj.grid().step();
    let coords: Vec<Vec<f64>> = (0..traj.dim()).map(|i| traj.coordinate(i)).collect();
    let comps: Vec<&[f64]> = coords.iter().map(Vec::as_slice).collect();
    let mut rep = WindowReport {
        windows: 0,
        cells_per_window: cells,
        violations: 0,
        max_ratio: 0.0,
    };
    for (s, t) in windows(traj.grid().steps(), cells) {
        let lhs = holder_norm(h, &comps, 1.0 - a, s..t + 1)?;
        let rhs = c.k_delta * (((t - s) as f64) * h).powf(a + b - 1.0);
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        rep.windows += 1;
        rep.max_ratio = rep.max_ratio.max(ratio);
        if ratio > 1.0 {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// Monte Carlo comparison of `mean[(C_T)^β]` against the mean of its
/// pathwise majorant, in both the corrected and the commonly printed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentShape {
    pub samples: usize,
    pub mean_c_t_pow_beta: f64,
    pub mean_rhs: f64,
    pub mean_rhs_printed: f64,
}

impl MomentShape {
    pub fn holds(&self) -> bool {
        self.mean_c_t_pow_beta <= self.mean_rhs
    }

    pub fn holds_printed(&self) -> bool {
        self.mean_c_t_pow_beta <= self.mean_rhs_printed
    }
}

pub fn moment_shape<'a>(rows: impl IntoIterator<Item = &'a BoundConstants>) -> MomentShape {
    let mut m = MomentShape {
        samples: 0,
        mean_c_t_pow_beta: 0.0,
        mean_rhs: 0.0,
        mean_rhs_printed: 0.0,
    };
    for c in rows {
        m.samples += 1;
        m.mean_c_t_pow_beta += c.c_t_pow_beta();
        m.mean_rhs += c.moment_rhs();
        m.mean_rhs_printed += c.moment_rhs_printed();
    }
    if m.samples > 0 {
        let k = m.samples as f64;
        m.mean_c_t_pow_beta /= k;
        m.mean_rhs /= k;
        m.mean_rhs_printed /= k;
    }
    m
}

/// Raw sample moments `E[X^k]`, `k = 1..=order`.
pub fn sample_moments(values: &[f64], order: usize) -> Vec<f64> {
    let n = values.len().max(1) as f64;
    (1..=order)
        .map(|k| values.iter().map(|v| v.powi(k as i32)).sum::<f64>() / n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{compute_constants, default_params, BoundOptions};
    use crate::fbm::{sample_paths, SamplingMethod};
    use crate::flow::{integrate_flow, VectorFieldSet};
    use crate::grid::TimeGrid;

    fn setup(seed: u64, steps: usize) -> (FlowTrajectory, BoundConstants) {
        let f = VectorFieldSet::parse("sine").unwrap();
        let p = default_params(0.75).unwrap();
        let path = sample_paths(TimeGrid::new(1.0, steps).unwrap(), 0.75, 2, seed, SamplingMethod::Cholesky).unwrap();
        let norms: Vec<f64> = (0..2).map(|c| path.holder_norm(c, p.beta()).unwrap()).collect();
        let c = compute_constants(p, &f, &norms, 1.0, BoundOptions::default()).unwrap();
        (integrate_flow(&f, &path, &[0.2, -0.1], 1).unwrap(), c)
    }

    #[test]
    fn singular_integral_exact_for_linear_motion() {
        // x_r = r e₁ on [0, 1]: ∫_0^1 (1 − r)^{−α} dr = 1/(1 − α)
        let f = VectorFieldSet::parse("constant:sigma=1").unwrap();
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let t: Vec<f64> = grid.times();
        let path = crate::fbm::FbmPath::from_values(grid, 0.75, vec![t], 0, SamplingMethod::Cholesky).unwrap();
        let tr = integrate_flow(&f, &path, &[0.0], 1).unwrap();
        let v = flow_singular_integral(&tr, 0, 64, 0.3);
        assert!((v - 1.0 / 0.7).abs() < 1e-12, "{v}");
    }

    #[test]
    fn lemma_and_holder_hold_on_sine_paths() {
        for seed in 0..3 {
            let (tr, c) = setup(seed, 2048);
            let lem = lemma_check(&tr, &c).unwrap();
            assert!(lem.windows >= 1 && lem.violations == 0, "{lem:?}");
            let hol = flow_holder_check(&tr, &c).unwrap();
            assert_eq!(hol.violations, 0, "{hol:?}");
        }
    }

    #[test]
    fn coarse_grid_is_reported() {
        let (tr, mut c) = setup(0, 64);
        c.delta = 1e-5;
        assert!(lemma_check(&tr, &c).is_err());
    }

    #[test]
    fn moments() {
        assert_eq!(sample_moments(&[1.0, 3.0], 2), vec![2.0, 5.0]);
        let rows: Vec<_> = (0..4).map(|s| setup(s, 256).1).collect();
        let m = moment_shape(&rows);
        assert_eq!(m.samples, 4);
        assert!(m.holds());
    }
}
