use std::ops::Range;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Grid Hölder seminorm `max_{i<j} ‖f(t_j) − f(t_i)‖₂ / (t_j − t_i)^β` over the
/// node index range `nodes` of a uniform grid with spacing `step`.
///
/// `components` holds one slice per coordinate of an ℝᵈ-valued function.
/// The scan is exact over grid pairs and therefore lower-bounds the
/// continuum norm.
pub fn holder_norm(step: f64, components: &[&[f64]], beta: f64, nodes: Range<usize>) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain(format!("Hölder exponent must lie in (0,1], got {beta}")));
    }
    if nodes.len() < 2 {
        return Err(Error::domain("Hölder window needs at least two nodes"));
    }
    if components.is_empty() || components.iter().any(|c| c.len() < nodes.end) {
        return Err(Error::domain("Hölder window exceeds the sampled range"));
    }
    let len = nodes.len();
    let inv_pow: Vec<f64> = (0..len)
        .map(|lag| if lag == 0 { 0.0 } else { (lag as f64 * step).powf(-beta) })
        .collect();
    let mut best_sq = 0.0f64;
    for i in nodes.clone() {
        for j in (i + 1)..nodes.end {
            let d2: f64 = components
                .iter()
                .map(|c| {
                    let d = c[j] - c[i];
                    d * d
                })
                .sum();
            let w = inv_pow[j - i];
            let r = d2 * w * w;
            if r > best_sq {
                best_sq = r;
            }
        }
    }
    Ok(best_sq.sqrt())
}

/// [`holder_norm`] over the time window `[a, b]` of `grid` (all nodes with `a ≤ t_k ≤ b`).
pub fn holder_norm_window(
    grid: &TimeGrid,
    components: &[&[f64]],
    beta: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    if !(a < b) {
        return Err(Error::domain(format!("empty window [{a}, {b}]")));
    }
    let h = grid.step();
    let first = ((a / h) - 1e-9).ceil().max(0.0) as usize;
    let last = (((b / h) + 1e-9).floor() as usize).min(grid.steps());
    if last <= first {
        return Err(Error::domain(format!("window [{a}, {b}] holds fewer than two nodes")));
    }
    holder_norm(h, components, beta, first..last + 1)
}
