/// Rough Hölder exponent of sampled data: least-squares slope of
/// `log max_k |f_{k+L} − f_k|` against `log L` for dyadic lags up to `N/4`.
/// Constant data returns 1. The result is clamped to `[0, 1]`.
pub fn holder_exponent(values: &[f64]) -> f64 {
    let n = values.len().saturating_sub(1);
    let mut pts = Vec::new();
    let mut lag = 1;
    while lag <= (n / 4).max(1) && lag < n.max(1) {
        let osc = (0..=n - lag)
            .map(|k| (values[k + lag] - values[k]).abs())
            .fold(0.0, f64::max);
        if osc > 0.0 {
            pts.push(((lag as f64).ln(), osc.ln()));
        }
        lag *= 2;
    }
    if pts.len() < 2 {
        return 1.0;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxy / sxx).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{sample_paths, SamplingMethod};
    use crate::grid::TimeGrid;

    #[test]
    fn smooth_and_power_functions() {
        let n = 1024;
        let lin: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        assert!((holder_exponent(&lin) - 1.0).abs() < 1e-9);
        let sin: Vec<f64> = (0..=n).map(|k| (3.0 * k as f64 / n as f64).sin()).collect();
        assert!(holder_exponent(&sin) > 0.95);
        let pow: Vec<f64> = (0..=n).map(|k| (k as f64 / n as f64).powf(0.4)).collect();
        assert!((holder_exponent(&pow) - 0.4).abs() < 1e-9);
        assert_eq!(holder_exponent(&[2.0; 10]), 1.0);
    }

    #[test]
    fn fbm_exponent_near_hurst() {
        let grid = TimeGrid::new(1.0, 2048).unwrap();
        let p = sample_paths(grid, 0.75, 1, 4, SamplingMethod::Cholesky).unwrap();
        let e = holder_exponent(p.channel(0));
        assert!((0.55..0.9).contains(&e), "estimated {e}");
    }
}
