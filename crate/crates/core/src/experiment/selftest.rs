use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::config::ExperimentConfig;
use super::run::run_with_options;
use crate::bounds::{compute_constants, constants_from_parts, default_params, HolderParams, solve_delta, tangent_growth_bound, BoundOptions};
use crate::error::Result;
use crate::fbm::{fbm_covariance, FbmGenerator, SamplingMethod};
use crate::flow::{integrate_flow, VectorFieldSet};
use crate::fraccalc::{rl_integral, weyl_derivative, zahle_integral, FracOrder, SampledFunction};
use crate::grid::TimeGrid;
use crate::manifold::{gram_hadamard_check, hausdorff_measure, make_manifold, measure_curve};

/// Knobs for [`selftest`].
#[derive(Debug, Clone, Copy)]
pub struct SelftestOptions {
    pub seed: u64,
    pub workers: usize,
    /// Negative control: scale `k₁` by 0.01, which must make the run fail.
    #[doc(hidden)]
    pub tamper_k1: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: 20240601,
            workers: 2,
            tamper_k1: false,
        }
    }
}

/// Outcome of one property.
#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn(&SelftestOptions) -> Result<(bool, String)>;

const PROPERTIES: &[(&str, Check)] = &[
    ("fbm_covariance", fbm_covariance_check),
    ("fractional_composition", composition_check),
    ("fractional_inversion", inversion_check),
    ("zahle_x_dx2", zahle_check),
    ("k1_golden", k1_check),
    ("delta_equation", delta_check),
    ("constant_flow_exact", constant_flow_check),
    ("tangent_bound", tangent_check),
    ("circle_measure", circle_check),
    ("hadamard_fuzz", hadamard_check),
    ("report_determinism", determinism_check),
];

/// Run the reduced property suite, printing one status line per property.
/// Returns all results; the run passed when every entry did.
pub fn selftest(out: &mut dyn Write, options: &SelftestOptions) -> std::io::Result<Vec<PropertyResult>> {
    let mut results = Vec::with_capacity(PROPERTIES.len());
    for &(name, check) in PROPERTIES {
        let t0 = Instant::now();
        let (passed, detail) = match check(options) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let seconds = t0.elapsed().as_secs_f64();
        let tag = if passed { "PASS" } else { "FAIL" };
        writeln!(out, "[{tag}] {name} ({seconds:.2}s) {detail}")?;
        results.push(PropertyResult {
            name,
            passed,
            detail,
            seconds,
        });
    }
    Ok(results)
}

fn bound_options(o: &SelftestOptions) -> BoundOptions {
    BoundOptions {
        k1_scale: if o.tamper_k1 { 0.01 } else { 1.0 },
        ..BoundOptions::default()
    }
}

fn fbm_covariance_check(o: &SelftestOptions) -> Result<(bool, String)> {
    let (n, samples, h) = (64, 4000, 0.75);
    let grid = TimeGrid::new(1.0, n)?;
    let gen = FbmGenerator::new(grid, h, SamplingMethod::Cholesky)?;
    let mut rng = ChaCha20Rng::seed_from_u64(o.seed);
    let pairs: Vec<(usize, usize)> = (0..5)
        .map(|_| (rng.random_range(n / 4..=n), rng.random_range(n / 4..=n)))
        .collect();
    let mut acc = vec![0.0; pairs.len()];
    for r in 0..samples {
        let p = gen.sample(1, o.seed.wrapping_add(r as u64))?;
        let x = p.channel(0);
        for (a, &(i, j)) in acc.iter_mut().zip(&pairs) {
            *a += x[i] * x[j];
        }
    }
    let mut worst = 0.0f64;
    for (a, &(i, j)) in acc.iter().zip(&pairs) {
        let want = fbm_covariance(grid.time(i), grid.time(j), h)?;
        worst = worst.max((a / samples as f64 - want).abs() / want);
    }
    Ok((worst < 0.1, format!("max rel err {worst:.4}")))
}

fn sup_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn composition_check(_: &SelftestOptions) -> Result<(bool, String)> {
    let f = SampledFunction::from_fn(0.0, 1.0, 256, f64::sin)?;
    let lhs = rl_integral(&rl_integral(&f, FracOrder::left(0.4))?, FracOrder::left(0.3))?;
    let rhs = rl_integral(&f, FracOrder::left(0.7))?;
    let err = sup_rel(lhs.values(), rhs.values());
    Ok((err < 1e-3, format!("sup rel err {err:.2e}")))
}

fn inversion_check(_: &SelftestOptions) -> Result<(bool, String)> {
    let f = SampledFunction::from_fn(0.0, 1.0, 256, |x| x)?;
    let back = weyl_derivative(&rl_integral(&f, FracOrder::left(0.4))?, FracOrder::left(0.4))?;
    let err = sup_rel(back.values(), f.values());
    Ok((err < 1e-2, format!("sup rel err {err:.2e}")))
}

fn zahle_check(_: &SelftestOptions) -> Result<(bool, String)> {
    let f = SampledFunction::from_fn(0.0, 1.0, 1024, |x| x)?;
    let g = SampledFunction::from_fn(0.0, 1.0, 1024, |x| x * x)?;
    let v = zahle_integral(&f, &g, 0.3)?;
    let err = (v - 2.0 / 3.0).abs();
    Ok((err < 1e-3, format!("abs err {err:.2e}")))
}

fn k1_check(o: &SelftestOptions) -> Result<(bool, String)> {
    // α = 0.4, β = 0.7
    let params = HolderParams::new(0.8, 0.1, 0.2)?;
    let c = constants_from_parts(params, &[(1.0, 1.0, 1.0)], 1, &[1.0], 1.0, bound_options(o))?;
    let err = (c.k1 - 2.2541209959720553).abs();
    Ok((err < 1e-12, format!("k1 = {:.16}", c.k1)))
}

fn delta_check(o: &SelftestOptions) -> Result<(bool, String)> {
    let fields = VectorFieldSet::parse("sine")?;
    let mut worst = 0.0f64;
    let mut s_max = 0.0f64;
    for h in [0.6, 0.75, 0.9] {
        let c = compute_constants(default_params(h)?, &fields, &[2.0, 3.0], 1.0, bound_options(o))?;
        let sol = solve_delta(&c)?;
        worst = worst.max(sol.residual);
        s_max = s_max.max(c.s);
    }
    Ok((worst < 1e-10 && s_max <= 2.0, format!("residual {worst:.1e}, max S {s_max:.4}")))
}

fn constant_flow_check(o: &SelftestOptions) -> Result<(bool, String)> {
    let grid = TimeGrid::new(1.0, 256)?;
    let path = FbmGenerator::new(grid, 0.75, SamplingMethod::Cholesky)?.sample(1, o.seed)?;
    let fields = VectorFieldSet::parse("constant")?;
    let traj = integrate_flow(&fields, &path, &[0.5, -1.0], 1)?;
    let err = (0..grid.len())
        .map(|k| (traj.state(k)[0] - 0.5 - path.channel(0)[k]).abs() + (traj.state(k)[1] + 1.0).abs())
        .fold(0.0, f64::max);
    Ok((err < 1e-12, format!("max err {err:.1e}")))
}

fn tangent_check(o: &SelftestOptions) -> Result<(bool, String)> {
    let grid = TimeGrid::new(1.0, 256)?;
    let h = 0.75;
    let params = default_params(h)?;
    let gen = FbmGenerator::new(grid, h, SamplingMethod::Cholesky)?;
    let fields = VectorFieldSet::parse("sine")?;
    let mesh = make_manifold("circle:r=1,n=2", 32)?;
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for r in 0..5u64 {
        let path = gen.sample(2, crate::rng::derive_seed(o.seed, r))?;
        let norms: Vec<f64> = (0..2).map(|c| path.holder_norm(c, params.beta())).collect::<Result<_>>()?;
        let c = compute_constants(params, &fields, &norms, 1.0, bound_options(o))?;
        let bound = tangent_growth_bound(&c, 1.0, 1.0)?;
        let sup = measure_curve(&mesh, &fields, &path)?.tangent_sup_l1;
        let slack = bound.log2 - sup.log2();
        min_slack = min_slack.min(slack);
        if slack < 0.0 {
            violations += 1;
        }
    }
    Ok((violations == 0, format!("violations {violations}, min log2 slack {min_slack:.3}")))
}

fn circle_check(_: &SelftestOptions) -> Result<(bool, String)> {
    let mesh = make_manifold("circle:r=1,n=2", 1000)?;
    let id = [1.0, 0.0, 0.0, 1.0];
    let jac: Vec<&[f64]> = vec![&id; mesh.len()];
    let err = (hausdorff_measure(&mesh, &jac)? - 2.0 * std::f64::consts::PI).abs();
    Ok((err < 1e-6, format!("abs err {err:.1e}")))
}

fn hadamard_check(o: &SelftestOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha20Rng::seed_from_u64(o.seed);
    let frames = 2000;
    let mut failed = 0;
    for _ in 0..frames {
        let m = rng.random_range(1..=3);
        let n = rng.random_range(m..=4);
        let vs: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let refs: Vec<&[f64]> = vs.iter().map(Vec::as_slice).collect();
        if !gram_hadamard_check(&refs) {
            failed += 1;
        }
    }
    Ok((failed == 0, format!("{failed}/{frames} frames failed")))
}

fn determinism_check(o: &SelftestOptions) -> Result<(bool, String)> {
    let mut cfg = ExperimentConfig::new("sine", 0.75);
    cfg.experiment.steps = 128;
    cfg.experiment.replications = 4;
    cfg.experiment.seed = o.seed;
    cfg.manifold.points = 32;
    let render = |workers| -> Result<Vec<u8>> {
        let rep = run_with_options(&cfg, workers, Some(bound_options(o)))?;
        let mut buf = Vec::new();
        rep.write_csv(&mut buf)?;
        Ok(buf)
    };
    let a = render(1)?;
    let b = render(o.workers.max(2))?;
    Ok((a == b, format!("{} bytes", a.len())))
}
