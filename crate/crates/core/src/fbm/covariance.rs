use crate::error::{Error, Result};

/// `E[B(s) B(t)] = ½ (t^{2H} + s^{2H} − |t − s|^{2H})`.
pub fn fbm_covariance(s: f64, t: f64, hurst: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::domain(format!("Hurst parameter must lie in (0,1), got {hurst}")));
    }
    if !(s >= 0.0 && t >= 0.0) {
        return Err(Error::domain(format!("times must be non-negative, got ({s}, {t})")));
    }
    Ok(covariance_unchecked(s, t, hurst))
}

#[inline]
pub(crate) fn covariance_unchecked(s: f64, t: f64, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2))
}

/// Autocovariance at lag `k` of unit-step fractional Gaussian noise.
pub fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) + (k - 1.0).abs().powf(h2) - 2.0 * k.powf(h2))
}
