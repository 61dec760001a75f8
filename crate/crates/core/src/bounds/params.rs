use crate::error::{Error, Result};

/// The exponent bundle: `α = 1 − H + δ`, `β = H − ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderParams {
    hurst: f64,
    epsilon: f64,
    delta: f64,
}

impl HolderParams {
    /// Requires `1−H < α < 1/2`, `δ > ε`, `β > α`, `α + β > 1`.
    pub fn new(hurst: f64, epsilon: f64, delta: f64) -> Result<Self> {
        if !(hurst > 0.5 && hurst < 1.0) {
            return Err(Error::domain(format!("H must lie in (1/2, 1), got {hurst}")));
        }
        if !(epsilon > 0.0 && delta > epsilon) {
            return Err(Error::domain(format!("need 0 < ε < δ, got ε = {epsilon}, δ = {delta}")));
        }
        let p = Self { hurst, epsilon, delta };
        let (a, b) = (p.alpha(), p.beta());
        if a >= 0.5 {
            return Err(Error::domain(format!("α = {a} must be < 1/2")));
        }
        if b <= a || a + b <= 1.0 {
            return Err(Error::domain(format!("degenerate exponents α = {a}, β = {b}")));
        }
        Ok(p)
    }

    /// `ε = (H − 1/2)/4`, `δ = (H − 1/2)/2`.
    pub fn default_for(hurst: f64) -> Result<Self> {
        let g = hurst - 0.5;
        Self::new(hurst, g / 4.0, g / 2.0)
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> f64 {
        1.0 - self.hurst + self.delta
    }

    pub fn beta(&self) -> f64 {
        self.hurst - self.epsilon
    }
}

/// Free-function form of [`HolderParams::default_for`].
pub fn default_params(hurst: f64) -> Result<HolderParams> {
    HolderParams::default_for(hurst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let p = default_params(0.75).unwrap();
        assert!((p.epsilon() - 0.0625).abs() < 1e-15);
        assert!((p.beta() - 0.6875).abs() < 1e-15);
        assert!((p.delta() - 0.125).abs() < 1e-15);
        assert!((p.alpha() - 0.375).abs() < 1e-15);
        let p = default_params(0.51).unwrap();
        assert!((p.alpha() - 0.495).abs() < 1e-12);
        assert!((p.beta() - 0.5075).abs() < 1e-12);
        assert!(default_params(0.5).is_err());
        assert!(default_params(1.0).is_err());
        assert!(HolderParams::new(0.75, 0.1, 0.05).is_err());
    }

    proptest! {
        #[test]
        fn defaults_satisfy_constraints(h in 0.5001f64..0.9999) {
            let p = default_params(h).unwrap();
            prop_assert!(1.0 - h < p.alpha() && p.alpha() < 0.5);
            prop_assert!(p.beta() > p.alpha() && p.alpha() + p.beta() > 1.0);
        }
    }
}
