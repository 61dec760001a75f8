use rayon::prelude::*;

use super::gram::{gram_volume, hadamard_majorant, hadamard_product};
use super::mesh::ManifoldMesh;
use crate::error::{Error, Result};
use crate::fbm::FbmPath;
use crate::flow::{EulerStepper, VectorFieldSet};
use crate::grid::TimeGrid;
use crate::linalg::matvec;

/// `Ĥ_m(M_{t_k})` at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureCurve {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub points: usize,
    pub rule: &'static str,
}

impl MeasureCurve {
    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::MIN, f64::max)
    }
}

/// Frame pushforward statistics gathered alongside a measure curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Pushforward {
    pub curve: MeasureCurve,
    /// `max_{q,i,k} ‖J_k v_i‖₁ / ‖v_i‖₁` over mesh points, frame vectors and nodes.
    pub tangent_sup_l1: f64,
    /// `max_{q,k}` of Gram volume over Hadamard's `Π‖v_i‖`.
    pub hadamard_ratio: f64,
}

fn density(mesh: &ManifoldMesh, q: usize, jac: &[f64], buf: &mut [Vec<f64>]) -> Result<(f64, f64)> {
    let n = mesh.ambient_dim();
    for (v, out) in mesh.frame(q).iter().zip(buf.iter_mut()) {
        matvec(n, jac, v, out);
    }
    let frame: Vec<&[f64]> = buf.iter().map(Vec::as_slice).collect();
    let vol = gram_volume(&frame);
    let bound = hadamard_majorant(&frame);
    if vol > bound * (1.0 + 1e-12) {
        return Err(Error::Majorization {
            point: q,
            volume: vol,
            bound,
        });
    }
    let prod = hadamard_product(&frame);
    Ok((vol, if prod > 0.0 { vol / prod } else { 0.0 }))
}

/// `Σ_q w_q · gram_volume(J_q v_1, …, J_q v_m)` for one Jacobian per mesh point
/// (row-major `n × n`), summed in ascending point order.
pub fn hausdorff_measure(mesh: &ManifoldMesh, jacobians: &[&[f64]]) -> Result<f64> {
    let n = mesh.ambient_dim();
    if jacobians.len() != mesh.len() {
        return Err(Error::domain(format!(
            "{} Jacobians for {} mesh points",
            jacobians.len(),
            mesh.len()
        )));
    }
    let mut buf = vec![vec![0.0; n]; mesh.intrinsic_dim()];
    let mut total = 0.0;
    for (q, jac) in jacobians.iter().enumerate() {
        if jac.len() != n * n {
            return Err(Error::domain("Jacobian shape does not match the ambient dimension"));
        }
        total += mesh.weights()[q] * density(mesh, q, jac, &mut buf)?.0;
    }
    Ok(total)
}

/// Solve the flow and Jacobian from every mesh point along `path` and
/// return the measure at each node. Points run in parallel; the quadrature
/// sum is taken in ascending point order.
pub fn measure_curve(mesh: &ManifoldMesh, fields: &VectorFieldSet, path: &FbmPath) -> Result<Pushforward> {
    let n = mesh.ambient_dim();
    if fields.dim() != n {
        return Err(Error::domain(format!(
            "field dimension {} differs from ambient dimension {n}",
            fields.dim()
        )));
    }
    if fields.channel_count() != path.channel_count() {
        return Err(Error::domain("path and field channel counts differ"));
    }
    let steps = path.grid().steps();
    let channels = path.channel_count();
    let increments: Vec<f64> = (0..steps)
        .flat_map(|k| (0..channels).map(move |g| (k, g)))
        .map(|(k, g)| path.increment(g, k))
        .collect();

    let per_point: Vec<Result<(Vec<f64>, f64, f64)>> = (0..mesh.len())
        .into_par_iter()
        .map(|q| {
            let mut stepper = EulerStepper::new(fields, mesh.point(q), true)?;
            let mut buf = vec![vec![0.0; n]; mesh.intrinsic_dim()];
            let norms0: Vec<f64> = mesh.frame(q).iter().map(|v| v.iter().map(|x| x.abs()).sum()).collect();
            let mut dens = Vec::with_capacity(steps + 1);
            let mut tsup = 0.0f64;
            let mut hrat = 0.0f64;
            for k in 0..=steps {
                if k > 0 {
                    stepper.step(&increments[(k - 1) * channels..k * channels], k - 1)?;
                }
                let (d, r) = density(mesh, q, stepper.jacobian().expect("requested"), &mut buf)?;
                dens.push(d);
                hrat = hrat.max(r);
                for (v, n0) in buf.iter().zip(&norms0) {
                    tsup = tsup.max(v.iter().map(|x| x.abs()).sum::<f64>() / n0);
                }
            }
            Ok((dens, tsup, hrat))
        })
        .collect();

    let mut values = vec![0.0; steps + 1];
    let mut tangent_sup_l1 = 0.0f64;
    let mut hadamard_ratio = 0.0f64;
    for (q, res) in per_point.into_iter().enumerate() {
        let (dens, tsup, hrat) = res?;
        let w = mesh.weights()[q];
        for (v, d) in values.iter_mut().zip(&dens) {
            *v += w * d;
        }
        tangent_sup_l1 = tangent_sup_l1.max(tsup);
        hadamard_ratio = hadamard_ratio.max(hrat);
    }
    Ok(Pushforward {
        curve: MeasureCurve {
            grid: *path.grid(),
            values,
            points: mesh.len(),
            rule: mesh.rule(),
        },
        tangent_sup_l1,
        hadamard_ratio,
    })
}
