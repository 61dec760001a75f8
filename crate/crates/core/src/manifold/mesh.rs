use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Sample points of an embedded `m`-manifold with orthonormal tangent frames
/// and quadrature weights summing to its `m`-dimensional measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldMesh {
    spec: String,
    m: usize,
    n: usize,
    points: Vec<Vec<f64>>,
    frames: Vec<Vec<Vec<f64>>>,
    weights: Vec<f64>,
    rule: &'static str,
}

impl ManifoldMesh {
    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, q: usize) -> &[f64] {
        &self.points[q]
    }

    pub fn frame(&self, q: usize) -> &[Vec<f64>] {
        &self.frames[q]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Name of the quadrature rule.
    pub fn rule(&self) -> &'static str {
        self.rule
    }

    /// `Σ_q w_q`.
    pub fn reference_measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn embed(n: usize, head: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[..head.len()].copy_from_slice(head);
    v
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / s).collect()
}

/// Gram–Schmidt on an independent frame.
fn orthonormalize(frame: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(frame.len());
    for mut v in frame {
        for u in &out {
            let c: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        out.push(normalize(v));
    }
    out
}

/// Parse `kind:key=value,...` and sample `points` points.
///
/// Kinds: `circle:r=1,n=2`, `sphere:r=1,n=3`, `torus:R=2,r=1` (in ℝ³),
/// `segment:length=1,n=2`.
pub fn make_manifold(spec: &str, points: usize) -> Result<ManifoldMesh> {
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = BTreeMap::new();
    for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::spec(spec, format!("expected key=value, got `{item}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::spec(spec, format!("bad number for `{k}`")))?;
        params.insert(k.trim().to_string(), v);
    }
    let mut take = |k: &str, default: f64| params.remove(k).unwrap_or(default);
    if points == 0 {
        return Err(Error::spec(spec, "need at least one point"));
    }
    let dim = |v: f64| -> Result<usize> {
        if v.fract() != 0.0 || v < 1.0 {
            return Err(Error::spec(spec, "ambient dimension must be a positive integer"));
        }
        Ok(v as usize)
    };
    let mesh = match kind {
        "circle" => {
            let (r, n) = (take("r", 1.0), dim(take("n", 2.0))?);
            check(spec, r > 0.0, "radius must be positive")?;
            check(spec, n > 1, "m >= n")?;
            let mut mesh = empty(spec, 1, n, "periodic trapezoid");
            for q in 0..points {
                let th = 2.0 * PI * q as f64 / points as f64;
                mesh.points.push(embed(n, &[r * th.cos(), r * th.sin()]));
                mesh.frames.push(vec![embed(n, &[-th.sin(), th.cos()])]);
                mesh.weights.push(2.0 * PI * r / points as f64);
            }
            mesh
        }
        "segment" => {
            let (len, n) = (take("length", 1.0), dim(take("n", 2.0))?);
            check(spec, len > 0.0, "length must be positive")?;
            check(spec, n > 1, "m >= n")?;
            let mut mesh = empty(spec, 1, n, "midpoint");
            for q in 0..points {
                let s = len * (q as f64 + 0.5) / points as f64;
                mesh.points.push(embed(n, &[s]));
                mesh.frames.push(vec![embed(n, &[1.0])]);
                mesh.weights.push(len / points as f64);
            }
            mesh
        }
        "sphere" => {
            let (r, n) = (take("r", 1.0), dim(take("n", 3.0))?);
            check(spec, r > 0.0, "radius must be positive")?;
            check(spec, n > 2, "m >= n")?;
            // equal-area cells: midpoint in z, uniform in azimuth
            let nz = ((points as f64 / 2.0).sqrt().round() as usize).max(1);
            let nphi = points.div_ceil(nz);
            let mut mesh = empty(spec, 2, n, "midpoint in z, periodic in azimuth");
            for i in 0..nz {
                let z = -1.0 + 2.0 * (i as f64 + 0.5) / nz as f64;
                let rho = (1.0 - z * z).sqrt();
                for j in 0..nphi {
                    let ph = 2.0 * PI * (j as f64 + 0.5 * (i % 2) as f64) / nphi as f64;
                    let (s, c) = ph.sin_cos();
                    mesh.points.push(embed(n, &[r * rho * c, r * rho * s, r * z]));
                    let e_phi = embed(n, &[-s, c, 0.0]);
                    let e_theta = embed(n, &[z * c, z * s, -rho]);
                    mesh.frames.push(orthonormalize(vec![e_phi, e_theta]));
                    mesh.weights.push(4.0 * PI * r * r / (nz * nphi) as f64);
                }
            }
            mesh
        }
        "torus" => {
            let (big, small) = (take("R", 2.0), take("r", 1.0));
            let n = dim(take("n", 3.0))?;
            check(spec, big > small && small > 0.0, "need R > r > 0")?;
            check(spec, n == 3, "torus lives in ℝ³")?;
            let nu = ((points as f64 * small / big).sqrt().round() as usize).max(3);
            let nv = points.div_ceil(nu).max(3);
            let mut mesh = empty(spec, 2, 3, "periodic trapezoid");
            let cell = 4.0 * PI * PI / (nu * nv) as f64;
            for i in 0..nu {
                let u = 2.0 * PI * i as f64 / nu as f64;
                for j in 0..nv {
                    let v = 2.0 * PI * j as f64 / nv as f64;
                    let rr = big + small * u.cos();
                    mesh.points.push(vec![rr * v.cos(), rr * v.sin(), small * u.sin()]);
                    let du = vec![-small * u.sin() * v.cos(), -small * u.sin() * v.sin(), small * u.cos()];
                    let dv = vec![-rr * v.sin(), rr * v.cos(), 0.0];
                    mesh.frames.push(orthonormalize(vec![du, dv]));
                    mesh.weights.push(small * rr * cell);
                }
            }
            mesh
        }
        other => return Err(Error::spec(spec, format!("unknown manifold kind `{other}`"))),
    };
    if let Some(k) = params.keys().next() {
        return Err(Error::spec(spec, format!("unknown parameter `{k}`")));
    }
    Ok(mesh)
}

fn check(spec: &str, ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::spec(spec, msg))
    }
}

fn empty(spec: &str, m: usize, n: usize, rule: &'static str) -> ManifoldMesh {
    ManifoldMesh {
        spec: spec.to_string(),
        m,
        n,
        points: Vec::new(),
        frames: Vec::new(),
        weights: Vec::new(),
        rule,
    }
}
