use super::field::VectorFieldSet;
use crate::error::{Error, Result};
use crate::fbm::{ConditionalRefiner, FbmPath};
use crate::grid::TimeGrid;
use crate::rng::derive_seed;

/// Stream tag mixed into the path seed for conditional refinement.
const REFINE_STREAM: u64 = 0x5EF1_7E00;

/// States `x_{t_k} = Φ_{t_k}(x0)` on a grid; row `k` holds the `n` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    grid: TimeGrid,
    dim: usize,
    states: Vec<f64>,
}

impl FlowTrajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn initial(&self) -> &[f64] {
        self.state(0)
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.grid.steps())
    }

    /// Values of coordinate `i` at every node.
    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.states.iter().skip(i).step_by(self.dim).copied().collect()
    }
}

/// Jacobians `DΦ_{t_k}` (row-major `n × n`) and optional pushforwards `v_{t_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentTrajectory {
    grid: TimeGrid,
    dim: usize,
    jacobians: Vec<f64>,
    vectors: Option<Vec<f64>>,
}

impl TangentTrajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jacobian(&self, k: usize) -> &[f64] {
        let nn = self.dim * self.dim;
        &self.jacobians[k * nn..(k + 1) * nn]
    }

    pub fn vector(&self, k: usize) -> Option<&[f64]> {
        self.vectors.as_ref().map(|v| &v[k * self.dim..(k + 1) * self.dim])
    }
}

/// One left-endpoint Euler step at a time, optionally carrying the Jacobian.
/// Used directly when only running statistics of a solve are needed.
#[derive(Debug, Clone)]
pub struct EulerStepper<'a> {
    fields: &'a VectorFieldSet,
    x: Vec<f64>,
    jac: Option<Vec<f64>>,
    u: Vec<f64>,
    w: Vec<f64>,
    a: Vec<f64>,
    tmp: Vec<f64>,
}

impl<'a> EulerStepper<'a> {
    pub fn new(fields: &'a VectorFieldSet, x0: &[f64], with_jacobian: bool) -> Result<Self> {
        let n = fields.dim();
        if x0.len() != n {
            return Err(Error::domain(format!("initial point has {} coordinates, field dimension is {n}", x0.len())));
        }
        let jac = with_jacobian.then(|| {
            let mut j = vec![0.0; n * n];
            for i in 0..n {
                j[i * n + i] = 1.0;
            }
            j
        });
        Ok(Self {
            fields,
            x: x0.to_vec(),
            jac,
            u: vec![0.0; n],
            w: vec![0.0; n * n],
            a: vec![0.0; n * n],
            tmp: vec![0.0; n * n],
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    pub fn jacobian(&self) -> Option<&[f64]> {
        self.jac.as_deref()
    }

    /// Advance by the channel increments `db`; `step` is reported on failure.
    pub fn step(&mut self, db: &[f64], step: usize) -> Result<()> {
        let n = self.fields.dim();
        if self.jac.is_some() {
            self.a.fill(0.0);
            for (g, &d) in db.iter().enumerate() {
                self.fields.jacobian(g, &self.x, &mut self.w);
                for (a, w) in self.a.iter_mut().zip(&self.w) {
                    *a += w * d;
                }
            }
        }
        let mut dx = vec![0.0; n];
        for (g, &d) in db.iter().enumerate() {
            self.fields.eval(g, &self.x, &mut self.u);
            for (dx, u) in dx.iter_mut().zip(&self.u) {
                *dx += u * d;
            }
        }
        for (x, d) in self.x.iter_mut().zip(&dx) {
            *x += d;
        }
        if let Some(j) = self.jac.as_mut() {
            crate::linalg::matmul(n, &self.a, j, &mut self.tmp);
            for (j, t) in j.iter_mut().zip(&self.tmp) {
                *j += t;
            }
            if j.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { step });
            }
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        Ok(())
    }
}

fn check_path(fields: &VectorFieldSet, path: &FbmPath) -> Result<()> {
    if path.channel_count() != fields.channel_count() {
        return Err(Error::domain(format!(
            "path has {} channels, field set has {}",
            path.channel_count(),
            fields.channel_count()
        )));
    }
    if path.hurst() <= 0.5 {
        log::warn!("H = {} <= 1/2: Euler sums need not converge to a pathwise integral", path.hurst());
    }
    Ok(())
}

/// `factor`-fold exact conditional refinement with a seed derived from the path's own.
pub fn refine_path(path: &FbmPath, factor: usize) -> Result<FbmPath> {
    if factor == 1 {
        return Ok(path.clone());
    }
    ConditionalRefiner::new(*path.grid(), path.hurst(), factor)?
        .refine(path, derive_seed(path.seed(), REFINE_STREAM))
}

/// Euler solve of the flow; with `refinement > 1` the path is first refined
/// and the trajectory lives on the refined grid.
pub fn integrate_flow(fields: &VectorFieldSet, path: &FbmPath, x0: &[f64], refinement: usize) -> Result<FlowTrajectory> {
    if refinement == 0 {
        return Err(Error::domain("refinement must be >= 1"));
    }
    check_path(fields, path)?;
    let refined;
    let path = if refinement > 1 {
        refined = refine_path(path, refinement)?;
        &refined
    } else {
        path
    };
    Ok(solve(fields, path, x0, false)?.0)
}

/// Jacobian and pushforward of `v0` along an already solved trajectory.
/// Produces exactly the Jacobian of [`integrate_joint`].
pub fn integrate_tangent(
    fields: &VectorFieldSet,
    path: &FbmPath,
    traj: &FlowTrajectory,
    v0: Option<&[f64]>,
) -> Result<TangentTrajectory> {
    check_path(fields, path)?;
    if traj.grid != *path.grid() {
        return Err(Error::domain("trajectory and path grids differ"));
    }
    let n = fields.dim();
    if traj.dim != n {
        return Err(Error::domain("trajectory dimension differs from the field's"));
    }
    let steps = path.grid().steps();
    let mut jac = vec![0.0; (steps + 1) * n * n];
    for i in 0..n {
        jac[i * n + i] = 1.0;
    }
    let mut w = vec![0.0; n * n];
    let mut a = vec![0.0; n * n];
    let mut tmp = vec![0.0; n * n];
    let nn = n * n;
    for k in 0..steps {
        a.fill(0.0);
        for g in 0..fields.channel_count() {
            fields.jacobian(g, traj.state(k), &mut w);
            let d = path.increment(g, k);
            for (a, w) in a.iter_mut().zip(&w) {
                *a += w * d;
            }
        }
        let (head, tail) = jac.split_at_mut((k + 1) * nn);
        let cur = &head[k * nn..];
        crate::linalg::matmul(n, &a, cur, &mut tmp);
        for ((next, c), t) in tail[..nn].iter_mut().zip(cur).zip(&tmp) {
            *next = c + t;
        }
        if tail[..nn].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: k });
        }
    }
    let vectors = v0.map(|v| pushforward(n, &jac, v)).transpose()?;
    Ok(TangentTrajectory {
        grid: *path.grid(),
        dim: n,
        jacobians: jac,
        vectors,
    })
}

/// State and Jacobian solved in one pass on the same increments.
pub fn integrate_joint(
    fields: &VectorFieldSet,
    path: &FbmPath,
    x0: &[f64],
    v0: Option<&[f64]>,
) -> Result<(FlowTrajectory, TangentTrajectory)> {
    check_path(fields, path)?;
    let (traj, jac) = solve(fields, path, x0, true)?;
    let jac = jac.expect("requested");
    let n = fields.dim();
    let vectors = v0.map(|v| pushforward(n, &jac, v)).transpose()?;
    let tangent = TangentTrajectory {
        grid: *path.grid(),
        dim: n,
        jacobians: jac,
        vectors,
    };
    Ok((traj, tangent))
}

fn pushforward(n: usize, jac: &[f64], v0: &[f64]) -> Result<Vec<f64>> {
    if v0.len() != n {
        return Err(Error::domain(format!("tangent vector has {} entries, dimension is {n}", v0.len())));
    }
    let mut out = Vec::with_capacity(jac.len() / n);
    let mut buf = vec![0.0; n];
    for j in jac.chunks_exact(n * n) {
        crate::linalg::matvec(n, j, v0, &mut buf);
        out.extend_from_slice(&buf);
    }
    Ok(out)
}

fn solve(
    fields: &VectorFieldSet,
    path: &FbmPath,
    x0: &[f64],
    with_jacobian: bool,
) -> Result<(FlowTrajectory, Option<Vec<f64>>)> {
    let n = fields.dim();
    let steps = path.grid().steps();
    let mut stepper = EulerStepper::new(fields, x0, with_jacobian)?;
    let mut states = Vec::with_capacity((steps + 1) * n);
    states.extend_from_slice(x0);
    let mut jacs = with_jacobian.then(|| {
        let mut v = Vec::with_capacity((steps + 1) * n * n);
        v.extend_from_slice(stepper.jacobian().expect("requested"));
        v
    });
    let mut db = vec![0.0; path.channel_count()];
    for k in 0..steps {
        for (g, d) in db.iter_mut().enumerate() {
            *d = path.increment(g, k);
        }
        stepper.step(&db, k)?;
        states.extend_from_slice(stepper.state());
        if let Some(j) = jacs.as_mut() {
            j.extend_from_slice(stepper.jacobian().expect("requested"));
        }
    }
    let traj = FlowTrajectory {
        grid: *path.grid(),
        dim: n,
        states,
    };
    Ok((traj, jacs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{sample_paths, FbmGenerator, SamplingMethod};

    fn path(h: f64, steps: usize, channels: usize, seed: u64) -> FbmPath {
        sample_paths(TimeGrid::new(1.0, steps).unwrap(), h, channels, seed, SamplingMethod::Cholesky).unwrap()
    }

    #[test]
    fn zero_field_is_identity() {
        let f = VectorFieldSet::parse("zero:n=2").unwrap();
        let p = path(0.7, 64, 1, 1);
        let (tr, tg) = integrate_joint(&f, &p, &[0.3, -1.0], Some(&[1.0, 2.0])).unwrap();
        for k in 0..=64 {
            assert_eq!(tr.state(k), &[0.3, -1.0]);
            assert_eq!(tg.jacobian(k), &[1.0, 0.0, 0.0, 1.0]);
            assert_eq!(tg.vector(k).unwrap(), &[1.0, 2.0]);
        }
    }

    #[test]
    fn constant_field_reproduces_the_path() {
        let f = VectorFieldSet::parse("constant:sigma=1.5").unwrap();
        let p = path(0.75, 256, 1, 2);
        let tr = integrate_flow(&f, &p, &[0.25], 1).unwrap();
        for k in 0..=256 {
            let want = 0.25 + 1.5 * p.channel(0)[k];
            assert!((tr.state(k)[0] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_tangent_equals_state_ratio() {
        let f = VectorFieldSet::parse("linear_test:lambda=1").unwrap();
        let p = path(0.75, 128, 1, 3);
        let (tr, tg) = integrate_joint(&f, &p, &[2.0], Some(&[1.0])).unwrap();
        for k in 0..=128 {
            assert!((tg.vector(k).unwrap()[0] - tr.state(k)[0] / 2.0).abs() < 1e-13);
        }
    }

    /// Median over 20 paths of log₂(err_N / err_2N) for the linear field
    /// against `x0·exp(B(T))`, the coarse paths being subsamples of one fine path.
    #[test]
    fn linear_convergence_order() {
        let f = VectorFieldSet::parse("linear_test:lambda=1").unwrap();
        let gen = FbmGenerator::new(TimeGrid::new(1.0, 2048).unwrap(), 0.75, SamplingMethod::Cholesky).unwrap();
        let mut orders = Vec::new();
        for seed in 0..20 {
            let fine = gen.sample(1, seed).unwrap();
            let exact = (fine.channel(0)[2048]).exp();
            let err = |factor: usize| {
                let p = fine.coarsened(factor).unwrap();
                (integrate_flow(&f, &p, &[1.0], 1).unwrap().last()[0] - exact).abs()
            };
            let (e1, e2) = (err(16), err(8));
            orders.push((e1 / e2).log2());
        }
        orders.sort_by(f64::total_cmp);
        let median = 0.5 * (orders[9] + orders[10]);
        assert!((0.2..=1.0).contains(&median), "{median}");
    }

    #[test]
    fn restart_at_midpoint_matches() {
        let f = VectorFieldSet::parse("sine").unwrap();
        let p = path(0.7, 256, 2, 4);
        let full = integrate_flow(&f, &p, &[0.1, 0.2], 1).unwrap();
        let first = FbmPath::from_values(
            TimeGrid::new(0.5, 128).unwrap(),
            0.7,
            p.channels().iter().map(|c| c[..=128].to_vec()).collect(),
            0,
            SamplingMethod::Cholesky,
        )
        .unwrap();
        let second = FbmPath::from_values(
            TimeGrid::new(0.5, 128).unwrap(),
            0.7,
            p.channels().iter().map(|c| c[128..].iter().map(|v| v - c[128]).collect()).collect(),
            0,
            SamplingMethod::Cholesky,
        )
        .unwrap();
        let a = integrate_flow(&f, &first, &[0.1, 0.2], 1).unwrap();
        let b = integrate_flow(&f, &second, a.last(), 1).unwrap();
        for i in 0..2 {
            assert!((b.last()[i] - full.last()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobian_matches_finite_difference_of_flow_map() {
        let f = VectorFieldSet::parse("sine:A=0.5,omega=1;2,channels=2").unwrap();
        let p = path(0.75, 512, 2, 5);
        let x0 = [0.3, -0.4];
        let (_, tg) = integrate_joint(&f, &p, &x0, None).unwrap();
        let h = 1e-6;
        for j in 0..2 {
            let mut xp = x0;
            let mut xm = x0;
            xp[j] += h;
            xm[j] -= h;
            let yp = integrate_flow(&f, &p, &xp, 1).unwrap();
            let ym = integrate_flow(&f, &p, &xm, 1).unwrap();
            for k in [100, 512] {
                for i in 0..2 {
                    let fd = (yp.state(k)[i] - ym.state(k)[i]) / (2.0 * h);
                    assert!((fd - tg.jacobian(k)[i * 2 + j]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn separate_tangent_pass_equals_joint() {
        let f = VectorFieldSet::parse("bump").unwrap();
        let p = path(0.8, 128, 2, 6);
        let (tr, joint) = integrate_joint(&f, &p, &[0.5, 0.5], Some(&[0.0, 1.0])).unwrap();
        let sep = integrate_tangent(&f, &p, &tr, Some(&[0.0, 1.0])).unwrap();
        assert_eq!(joint, sep);
    }

    #[test]
    fn orientation_preserved_for_sine() {
        let f = VectorFieldSet::parse("sine").unwrap();
        for seed in 0..5 {
            let p = path(0.75, 1024, 2, seed);
            let (_, tg) = integrate_joint(&f, &p, &[0.0, 0.0], None).unwrap();
            for k in 0..=1024 {
                assert!(crate::linalg::determinant(2, tg.jacobian(k)) > 0.0);
            }
        }
    }

    #[test]
    fn refinement_keeps_coarse_nodes_close() {
        let f = VectorFieldSet::parse("constant:sigma=1").unwrap();
        let p = path(0.75, 64, 1, 7);
        let tr = integrate_flow(&f, &p, &[0.0], 4).unwrap();
        assert_eq!(tr.grid().steps(), 256);
        for k in 0..=64 {
            assert!((tr.state(4 * k)[0] - p.channel(0)[k]).abs() < 1e-12);
        }
        assert_eq!(tr, integrate_flow(&f, &p, &[0.0], 4).unwrap());
    }

    #[test]
    fn blow_up_reports_step() {
        let f = VectorFieldSet::parse("linear_test:lambda=1e300").unwrap();
        let p = path(0.75, 16, 1, 8);
        assert!(matches!(integrate_flow(&f, &p, &[1e10], 1), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn mismatched_inputs() {
        let f = VectorFieldSet::parse("sine").unwrap();
        let p = path(0.75, 16, 1, 9);
        assert!(integrate_flow(&f, &p, &[0.0, 0.0], 1).is_err());
        let p = path(0.75, 16, 2, 9);
        assert!(integrate_flow(&f, &p, &[0.0], 1).is_err());
        assert!(integrate_flow(&f, &p, &[0.0, 0.0], 0).is_err());
    }
}
