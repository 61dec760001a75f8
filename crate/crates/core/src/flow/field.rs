use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Sine,
    GaussianBump,
    Constant,
    LinearTest,
    Zero,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldKind::Sine => "sine",
            FieldKind::GaussianBump => "gaussian_bump",
            FieldKind::Constant => "constant",
            FieldKind::LinearTest => "linear_test",
            FieldKind::Zero => "zero",
        })
    }
}

/// `M_γ`, `M⁽¹⁾_γ`, `M⁽²⁾_γ`: sup bound of the components, Lipschitz bound of
/// the components, and Lipschitz bound of the Jacobian entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConstants {
    pub sup: f64,
    pub lip: f64,
    pub lip_jacobian: f64,
}

#[derive(Debug, Clone)]
enum Channel {
    /// `U^i(x) = A_i sin(⟨ω_i, x⟩ + φ_i)`.
    Sine {
        amp: Vec<f64>,
        omega: Vec<Vec<f64>>,
        phase: Vec<f64>,
    },
    /// `U(x) = a · exp(−‖x − c‖² / 2s²)`.
    Bump {
        amp: Vec<f64>,
        center: Vec<f64>,
        width: f64,
    },
    Constant(Vec<f64>),
    Linear(f64),
    Zero,
}

/// The fields `U_γ`, one per driving channel, on `ℝⁿ`.
#[derive(Debug, Clone)]
pub struct VectorFieldSet {
    kind: FieldKind,
    spec: String,
    dim: usize,
    channels: Vec<Channel>,
    constants: Vec<FieldConstants>,
}

/// Named field presets accepted wherever a field spec is expected.
pub fn preset_spec(name: &str) -> Option<&'static str> {
    Some(match name {
        "sine" => "sine:A=0.2,omega=1;1,channels=2",
        "bump" | "gaussian_bump" => "gaussian_bump:A=0.3;0.3,center=0;0,width=1,channels=2",
        "constant" => "constant:sigma=1;0",
        "linear" | "linear_test" => "linear_test:lambda=1,n=1",
        "zero" => "zero:n=2",
        _ => return None,
    })
}

fn parse_params(spec: &str, body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::spec(spec, format!("expected key=value, got `{item}`")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

struct Params<'a> {
    spec: &'a str,
    map: BTreeMap<String, String>,
}

impl Params<'_> {
    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(raw) = self.map.remove(key) else {
            return Ok(None);
        };
        raw.split(';')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::spec(self.spec, format!("bad number in `{key}={raw}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn scalar(&mut self, key: &str) -> Result<Option<f64>> {
        match self.list(key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(v[0])),
            Some(_) => Err(Error::spec(self.spec, format!("`{key}` takes a single value"))),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        let Some(raw) = self.map.remove(key) else {
            return Ok(None);
        };
        raw.parse::<usize>()
            .ok()
            .filter(|&c| c >= 1)
            .map(Some)
            .ok_or_else(|| Error::spec(self.spec, format!("`{key}` must be a positive integer")))
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::spec(self.spec, format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }
}

fn broadcast(spec: &str, key: &str, v: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    match v.len() {
        1 => Ok(vec![v[0]; n]),
        len if len == n => Ok(v),
        len => Err(Error::spec(spec, format!("`{key}` has {len} entries, dimension is {n}"))),
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl VectorFieldSet {
    /// Build from a spec string `kind:key=value,...` (list values separated by
    /// `;`) or from a preset name.
    ///
    /// ```
    /// use fbflow_core::flow::VectorFieldSet;
    /// let f = VectorFieldSet::parse("sine:A=1,omega=1;0,phase=0,channels=1").unwrap();
    /// let c = f.constants()[0];
    /// assert_eq!((c.sup, c.lip, c.lip_jacobian), (1.0, 1.0, 1.0));
    /// ```
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(p) = preset_spec(spec) {
            return Self::parse(p);
        }
        let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
        let mut p = Params {
            spec,
            map: parse_params(spec, body)?,
        };
        let set = match kind {
            "sine" => {
                let omega = p.list("omega")?.ok_or_else(|| Error::spec(spec, "missing `omega`"))?;
                let n = omega.len();
                let amp = broadcast(spec, "A", p.list("A")?.unwrap_or(vec![1.0]), n)?;
                let phase = p.scalar("phase")?.unwrap_or(0.0);
                let channels = p.count("channels")?.unwrap_or(n);
                Self::sine(spec, amp, &omega, phase, channels)?
            }
            "gaussian_bump" | "bump" => {
                let amp = p.list("A")?.ok_or_else(|| Error::spec(spec, "missing `A`"))?;
                let n = amp.len();
                let center = broadcast(spec, "center", p.list("center")?.unwrap_or(vec![0.0]), n)?;
                let width = p.scalar("width")?.unwrap_or(1.0);
                if width <= 0.0 {
                    return Err(Error::spec(spec, "width must be positive"));
                }
                let count = p.count("channels")?.unwrap_or(1);
                let channels: Vec<Channel> = (0..count)
                    .map(|g| {
                        let mut c = center.clone();
                        c[g % n] += g as f64 * width;
                        Channel::Bump {
                            amp: amp.clone(),
                            center: c,
                            width,
                        }
                    })
                    .collect();
                Self::assemble(FieldKind::GaussianBump, spec, n, channels)
            }
            "constant" => {
                let sigma = p.list("sigma")?.ok_or_else(|| Error::spec(spec, "missing `sigma`"))?;
                let count = p.count("channels")?.unwrap_or(1);
                let n = sigma.len();
                Self::assemble(FieldKind::Constant, spec, n, vec![Channel::Constant(sigma); count])
            }
            "linear_test" | "linear" => {
                let lambda = p.scalar("lambda")?.unwrap_or(1.0);
                let n = p.count("n")?.unwrap_or(1);
                Self::assemble(FieldKind::LinearTest, spec, n, vec![Channel::Linear(lambda)])
            }
            "zero" => {
                let n = p.count("n")?.unwrap_or(2);
                let count = p.count("channels")?.unwrap_or(1);
                Self::assemble(FieldKind::Zero, spec, n, vec![Channel::Zero; count])
            }
            other => return Err(Error::spec(spec, format!("unknown field kind `{other}`"))),
        };
        p.finish()?;
        Ok(set)
    }

    /// Sine field with `channels` channels. Channel γ, component i uses the
    /// base frequency cyclically shifted by i, with coordinate `(γ−1) mod n`
    /// sign-flipped for γ ≥ 1, and phase `φ + (γn + i)π/3`; every variant
    /// has the norm of the base frequency, so the constants are shared.
    pub fn sine(spec: &str, amp: Vec<f64>, omega: &[f64], phase: f64, channels: usize) -> Result<Self> {
        let n = omega.len();
        if n == 0 || amp.len() != n {
            return Err(Error::spec(spec, "amplitude and frequency must have the field dimension"));
        }
        if amp.iter().all(|a| *a == 0.0) {
            return Err(Error::spec(spec, "sine field with zero amplitude is degenerate"));
        }
        let chans = (0..channels)
            .map(|g| {
                let om = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let w = omega[(j + i) % n];
                                if g >= 1 && j == (g - 1) % n {
                                    -w
                                } else {
                                    w
                                }
                            })
                            .collect()
                    })
                    .collect();
                let ph = (0..n).map(|i| phase + (g * n + i) as f64 * PI / 3.0).collect();
                Channel::Sine {
                    amp: amp.clone(),
                    omega: om,
                    phase: ph,
                }
            })
            .collect();
        Ok(Self::assemble(FieldKind::Sine, spec, n, chans))
    }

    fn assemble(kind: FieldKind, spec: &str, dim: usize, channels: Vec<Channel>) -> Self {
        let constants = channels.iter().map(channel_constants).collect();
        Self {
            kind,
            spec: spec.to_string(),
            dim,
            channels,
            constants,
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn constants(&self) -> &[FieldConstants] {
        &self.constants
    }

    /// False for fields violating the uniform bound (the linear test field).
    pub fn is_conforming(&self) -> bool {
        self.kind != FieldKind::LinearTest
    }

    /// Writes `U_γ(x)` into `out`.
    pub fn eval(&self, gamma: usize, x: &[f64], out: &mut [f64]) {
        match &self.channels[gamma] {
            Channel::Sine { amp, omega, phase } => {
                for i in 0..self.dim {
                    out[i] = amp[i] * (dot(&omega[i], x) + phase[i]).sin();
                }
            }
            Channel::Bump { amp, center, width } => {
                let phi = bump(x, center, *width);
                for i in 0..self.dim {
                    out[i] = amp[i] * phi;
                }
            }
            Channel::Constant(s) => out.copy_from_slice(s),
            Channel::Linear(l) => {
                for i in 0..self.dim {
                    out[i] = l * x[i];
                }
            }
            Channel::Zero => out.fill(0.0),
        }
    }

    /// Writes the row-major Jacobian `W_γ(x)[i][j] = ∂U^i_γ/∂x^j` into `out`.
    pub fn jacobian(&self, gamma: usize, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        match &self.channels[gamma] {
            Channel::Sine { amp, omega, phase } => {
                for i in 0..n {
                    let c = amp[i] * (dot(&omega[i], x) + phase[i]).cos();
                    for j in 0..n {
                        out[i * n + j] = c * omega[i][j];
                    }
                }
            }
            Channel::Bump { amp, center, width } => {
                let phi = bump(x, center, *width);
                let s2 = width * width;
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = -amp[i] * phi * (x[j] - center[j]) / s2;
                    }
                }
            }
            Channel::Linear(l) => {
                out.fill(0.0);
                for i in 0..n {
                    out[i * n + i] = *l;
                }
            }
            Channel::Constant(_) | Channel::Zero => out.fill(0.0),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn bump(x: &[f64], center: &[f64], width: f64) -> f64 {
    let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
    (-r2 / (2.0 * width * width)).exp()
}

fn channel_constants(c: &Channel) -> FieldConstants {
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    match c {
        Channel::Sine { amp, omega, .. } => {
            let mut out = FieldConstants {
                sup: 0.0,
                lip: 0.0,
                lip_jacobian: 0.0,
            };
            for (a, w) in amp.iter().zip(omega) {
                let w = norm2(w);
                out.sup = out.sup.max(a.abs());
                out.lip = out.lip.max(a.abs() * w);
                out.lip_jacobian = out.lip_jacobian.max(a.abs() * w * w);
            }
            out
        }
        Channel::Bump { amp, width, .. } => {
            // sup ‖∇φ‖ = 1/(s√e) at radius s; sup ‖∇∂_jφ‖ = 1/s² at the centre
            let a = max_abs(amp);
            FieldConstants {
                sup: a,
                lip: a / (width * std::f64::consts::E.sqrt()),
                lip_jacobian: a / (width * width),
            }
        }
        Channel::Constant(s) => FieldConstants {
            sup: max_abs(s),
            lip: 0.0,
            lip_jacobian: 0.0,
        },
        Channel::Linear(l) => FieldConstants {
            sup: f64::INFINITY,
            lip: l.abs(),
            lip_jacobian: 0.0,
        },
        Channel::Zero => FieldConstants {
            sup: 0.0,
            lip: 0.0,
            lip_jacobian: 0.0,
        },
    }
}
