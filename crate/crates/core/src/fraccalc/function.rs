use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::spec(other, "expected `left` or `right`")),
        }
    }
}

/// Order and side of a fractional operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    pub alpha: f64,
    pub side: Side,
}

impl FracOrder {
    pub fn left(alpha: f64) -> Self {
        Self { alpha, side: Side::Left }
    }

    pub fn right(alpha: f64) -> Self {
        Self { alpha, side: Side::Right }
    }
}

/// Node values of a real function on a uniform grid of `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
        }
        if values.len() < 2 {
            return Err(Error::domain("sampled function needs at least two nodes"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sampled function has non-finite values"));
        }
        Ok(Self { a, b, values })
    }

    /// Sample `f` at `steps + 1` equispaced nodes of `[a, b]`.
    pub fn from_fn(a: f64, b: f64, steps: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (b - a) / steps as f64;
        let values = (0..=steps)
            .map(|k| f(if k == steps { b } else { a + k as f64 * h }))
            .collect();
        Self::new(a, b, values)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps() {
            self.b
        } else {
            self.a + k as f64 * self.step()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same grid, new values.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            a: self.a,
            b: self.b,
            values,
        }
    }

    /// Restriction to the sub-window `[a, b]`, whose endpoints must be grid nodes.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        let h = self.step();
        let idx = |t: f64| {
            let x = (t - self.a) / h;
            let k = x.round();
            if k >= 0.0 && k <= self.steps() as f64 && (x - k).abs() < 1e-9 * (1.0 + k) {
                Some(k as usize)
            } else {
                None
            }
        };
        let (Some(i), Some(j)) = (idx(a), idx(b)) else {
            return Err(Error::domain(format!("window [{a}, {b}] is not aligned with the grid")));
        };
        if j <= i {
            return Err(Error::domain(format!("empty window [{a}, {b}]")));
        }
        Self::new(self.time(i), self.time(j), self.values[i..=j].to_vec())
    }
}
