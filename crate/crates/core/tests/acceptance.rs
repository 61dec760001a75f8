//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};
use std::time::Instant;

use fbflow_core::bounds::{compute_constants, default_params, lemma_check, solve_delta, BoundOptions, DeltaMode};
use fbflow_core::experiment::{run_bound_experiment, BoundReport, ExperimentConfig};
use fbflow_core::fbm::{FbmGenerator, SamplingMethod};
use fbflow_core::flow::{integrate_flow, VectorFieldSet};
use fbflow_core::fraccalc::{rl_integral, weyl_derivative, zahle_integral, FracOrder, SampledFunction};
use fbflow_core::manifold::{gram_hadamard_check, hausdorff_measure, make_manifold};
use fbflow_core::rng::derive_seed;
use fbflow_core::TimeGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::function::gamma::gamma;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok { Ok(detail) } else { Err(detail) }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }
}

fn sup_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn fbm_covariance() -> Outcome {
    let t0 = Instant::now();
    let (n, samples) = (256, 10_000);
    let grid = TimeGrid::new(1.0, n).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for h in [0.6, 0.75, 0.9] {
        let gen = FbmGenerator::new(grid, h, SamplingMethod::Cholesky).map_err(|e| e.to_string())?;
        let pairs: Vec<(usize, usize)> = (0..10).map(|_| (rng.random_range(1..=n), rng.random_range(1..=n))).collect();
        let mut acc = vec![0.0; pairs.len()];
        for r in 0..samples {
            let p = gen.sample(1, derive_seed(7, r)).map_err(|e| e.to_string())?;
            let x = p.channel(0);
            for (a, &(i, j)) in acc.iter_mut().zip(&pairs) {
                *a += x[i] * x[j];
            }
        }
        for (a, &(i, j)) in acc.iter().zip(&pairs) {
            let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
            let want = 0.5 * (s.powf(2.0 * h) + t.powf(2.0 * h) - (t - s).abs().powf(2.0 * h));
            worst = worst.max((a / samples as f64 - want).abs() / want);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    check(worst < 0.05 && secs < 60.0, format!("max rel err {worst:.4} (< 0.05), {secs:.1}s (< 60s)"))
}

fn fractional_laws() -> Outcome {
    let n = 2048;
    let fs: [fn(f64) -> f64; 3] = [|_| 1.0, |x| x, f64::sin];
    let (mut comp, mut inv) = (0.0f64, 0.0f64);
    for g in fs {
        let f = SampledFunction::from_fn(0.0, 1.0, n, g).unwrap();
        let i4 = rl_integral(&f, FracOrder::left(0.4)).unwrap();
        let lhs = rl_integral(&i4, FracOrder::left(0.3)).unwrap();
        let rhs = rl_integral(&f, FracOrder::left(0.7)).unwrap();
        comp = comp.max(sup_rel(lhs.values(), rhs.values()));
        // the derivative carries the indicator of (a, b), so node 0 is zero by definition
        let back = weyl_derivative(&i4, FracOrder::left(0.4)).unwrap();
        inv = inv.max(sup_rel(&back.values()[1..], &f.values()[1..]));
    }
    let one = SampledFunction::from_fn(0.0, 1.0, n, |_| 1.0).unwrap();
    let x = SampledFunction::from_fn(0.0, 1.0, n, |x| x).unwrap();
    let at_end = |f: SampledFunction| f.values()[n];
    let goldens = [
        (at_end(rl_integral(&one, FracOrder::left(0.5)).unwrap()), FRAC_2_SQRT_PI),
        (at_end(rl_integral(&x, FracOrder::left(0.5)).unwrap()), 0.752252778063675),
        (at_end(rl_integral(&one, FracOrder::left(0.7)).unwrap()), 1.1005474055236655),
        (at_end(rl_integral(&x, FracOrder::left(0.7)).unwrap()), 0.6473808267786268),
        (at_end(weyl_derivative(&x, FracOrder::left(0.4)).unwrap()), 1.1191749540701224),
        (rl_integral(&one, FracOrder::right(0.5)).unwrap().values()[0], FRAC_2_SQRT_PI),
    ];
    let golden = goldens.iter().fold(0.0f64, |m, (got, want)| m.max((got - want).abs()));
    check(
        comp < 1e-3 && inv < 1e-2 && golden < 1e-4,
        format!("composition {comp:.2e} (< 1e-3), inversion {inv:.2e} (< 1e-2), power rule {golden:.2e} (< 1e-4)"),
    )
}

fn zahle() -> Outcome {
    let f = SampledFunction::from_fn(0.0, 1.0, 2048, |x| x).unwrap();
    let g = SampledFunction::from_fn(0.0, 1.0, 2048, |x| x * x).unwrap();
    let vals: Vec<f64> = [0.2, 0.3, 0.4].iter().map(|&a| zahle_integral(&f, &g, a).unwrap()).collect();
    let err = vals.iter().fold(0.0f64, |m, v| m.max((v - 2.0 / 3.0).abs() / (2.0 / 3.0)));
    let spread = vals.iter().fold(f64::MIN, |m, &v| m.max(v)) - vals.iter().fold(f64::MAX, |m, &v| m.min(v));
    check(err < 1e-3 && spread < 2e-3, format!("rel err {err:.2e} (< 1e-3), α spread {spread:.2e} (< 2e-3)"))
}

fn flow_oracle() -> Outcome {
    let t0 = Instant::now();
    let gen = FbmGenerator::new(TimeGrid::new(1.0, 2048).unwrap(), 0.75, SamplingMethod::Cholesky).unwrap();
    let constant = VectorFieldSet::parse("constant:sigma=1;-0.5").unwrap();
    let linear = VectorFieldSet::parse("linear_test:lambda=1,n=1").unwrap();
    let mut exact_err = 0.0f64;
    let mut orders = Vec::new();
    for r in 0..20 {
        let fine = gen.sample(1, derive_seed(40, r)).unwrap();
        let b = fine.channel(0);
        let traj = integrate_flow(&constant, &fine, &[0.25, 1.0], 1).unwrap();
        for (k, bk) in b.iter().enumerate() {
            let s = traj.state(k);
            exact_err = exact_err.max((s[0] - 0.25 - bk).abs()).max((s[1] - 1.0 + 0.5 * bk).abs());
        }
        let exact = 1.5 * b[2048].exp();
        // least-squares slope of log₂ error against log₂ step over four levels
        let pts: Vec<(f64, f64)> = [64usize, 32, 16, 8]
            .iter()
            .map(|&m| {
                let p = fine.coarsened(m).unwrap();
                let e = (integrate_flow(&linear, &p, &[1.5], 1).unwrap().last()[0] - exact).abs();
                ((m as f64).log2(), e.log2())
            })
            .collect();
        let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / 4.0, b + y / 4.0));
        let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        orders.push(num / den);
    }
    let order = median(orders);
    let secs = t0.elapsed().as_secs_f64();
    check(
        exact_err < 1e-12 && (0.2..=1.0).contains(&order) && secs < 120.0,
        format!("constant field err {exact_err:.1e}, median order {order:.3} (in [0.2, 1.0]), {secs:.1}s (< 120s)"),
    )
}

fn lemma() -> Outcome {
    let fields = VectorFieldSet::parse("sine").unwrap();
    let params = default_params(0.75).unwrap();
    let gen = FbmGenerator::new(TimeGrid::new(1.0, 2048).unwrap(), 0.75, SamplingMethod::Cholesky).unwrap();
    let (mut windows, mut violations, mut worst) = (0, 0, 0.0f64);
    for r in 0..50 {
        let p = gen.sample(2, derive_seed(50, r)).unwrap();
        let norms: Vec<f64> = (0..2).map(|c| p.holder_norm(c, params.beta()).unwrap()).collect();
        let c = compute_constants(params, &fields, &norms, 1.0, BoundOptions::default()).unwrap();
        let traj = integrate_flow(&fields, &p, &[0.3, -0.7], 1).unwrap();
        let rep = lemma_check(&traj, &c).map_err(|e| e.to_string())?;
        windows += rep.windows;
        violations += rep.violations;
        worst = worst.max(rep.max_ratio);
    }
    check(violations == 0, format!("{violations} violations over {windows} windows, max ratio {worst:.3}"))
}

/// Right side of the Δ equation in majorant mode, assembled from the field
/// constants without going through the library's constant chain.
fn delta_rhs_independent(h: f64, fields: &VectorFieldSet, norms: &[f64], delta: f64) -> (f64, f64) {
    let p = default_params(h).unwrap();
    let (a, b) = (p.alpha(), p.beta());
    let n = fields.dim() as f64;
    let k1 = (2.0 * a + b - 1.0) / ((a + b - 1.0) * gamma(a));
    let ca = 1.0 / gamma(1.0 - a);
    let consts = fields.constants();
    let sum = |f: &dyn Fn(f64, f64, f64) -> f64| -> f64 {
        consts.iter().zip(norms).map(|(c, nb)| f(c.sup, c.lip, c.lip_jacobian) * nb).sum()
    };
    let mt1 = sum(&|_, m1, _| a * m1 / (1.0 - 2.0 * a)) / (2.0 - 2.0 * a);
    let kb = sum(&|m, _, _| m) / (a * sum(&|_, m1, _| m1));
    let a2 = sum(&|_, m1, m2| ca * (m1 + a * m2 * kb)) / (1.0 - a);
    let b2 = sum(&|_, m1, _| a * m1 * ca / (b - a)) / (1.0 - a + b);
    let rhs = 3.0 * n * k1 * (ca * mt1).max(a2 + b2);
    let db = delta.powf(b);
    let s = 1.0 / (1.0 - n * k1 * a2 * db / (1.0 - n * k1 * b2 * db));
    (rhs, s)
}

fn delta_solver() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let (mut worst, mut indep, mut s_max, mut cases) = (0.0f64, 0.0f64, 0.0f64, 0);
    for spec in ["sine", "bump", "sine:A=1,omega=3;0.5,channels=3"] {
        let fields = VectorFieldSet::parse(spec).unwrap();
        for h in [0.55, 0.6, 0.75, 0.9] {
            for _ in 0..5 {
                let norms: Vec<f64> = (0..fields.channel_count()).map(|_| rng.random_range(0.1..20.0)).collect();
                for mode in [DeltaMode::Majorant, DeltaMode::Exact] {
                    let opts = BoundOptions { mode, ..BoundOptions::default() };
                    let c = compute_constants(default_params(h).unwrap(), &fields, &norms, 1.0, opts).unwrap();
                    let sol = solve_delta(&c).unwrap();
                    let lhs = c.delta.powf(-c.params.beta());
                    worst = worst.max(sol.residual).max((lhs - c.delta_rhs(c.delta)).abs() / lhs);
                    s_max = s_max.max(c.s);
                    if mode == DeltaMode::Majorant {
                        let (rhs, s) = delta_rhs_independent(h, &fields, &norms, c.delta);
                        indep = indep.max((lhs - rhs).abs() / lhs).max((s - c.s).abs() / s);
                    }
                    cases += 1;
                }
            }
        }
    }
    check(
        worst < 1e-10 && indep < 1e-10 && s_max <= 2.0,
        format!("{cases} cases, residual {worst:.1e}, independent {indep:.1e} (< 1e-10), max S {s_max:.4} (≤ 2)"),
    )
}

fn certify_config(h: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("sine", h);
    cfg.experiment.horizon = 1.0;
    cfg.experiment.steps = 1024;
    cfg.experiment.replications = 100;
    cfg.experiment.seed = 2024;
    cfg.manifold.spec = "circle:r=1,n=2".into();
    cfg.manifold.points = 500;
    cfg
}

/// Tangent and Hausdorff certification on the shared runs. The bounds are
/// rebuilt from each row's `S` and `p`.
fn certify(reports: &[(f64, BoundReport)], secs: f64) -> (Outcome, Outcome) {
    let mut tangent = Vec::new();
    let mut haus = Vec::new();
    let (mut tv, mut hv, mut errors) = (0, 0, 0);
    let mut mismatch = 0.0f64;
    for (_, rep) in reports {
        let (mut ts, mut hs) = (Vec::new(), Vec::new());
        for row in &rep.rows {
            let Ok(v) = &row.outcome else {
                errors += 1;
                continue;
            };
            let t_log2 = v.p.ceil() * v.s.log2();
            let h_log2 = (2f64.sqrt() * 2.0 * PI).log2() + t_log2;
            mismatch = mismatch.max((t_log2 - v.tangent_bound_log2).abs()).max((h_log2 - v.hausdorff_bound_log2).abs());
            if v.tangent_sup.log2() > t_log2 {
                tv += 1;
            }
            if v.hausdorff_sup.log2() > h_log2 {
                hv += 1;
            }
            ts.push(t_log2 - v.tangent_sup.log2());
            hs.push(h_log2 - v.hausdorff_sup.log2());
        }
        tangent.push(median(ts));
        haus.push(median(hs));
    }
    let label = |v: &[f64]| {
        reports.iter().zip(v).map(|((h, _), m)| format!("H={h}: {m:.1}")).collect::<Vec<_>>().join(", ")
    };
    let consistent = mismatch < 1e-9 && errors == 0;
    (
        check(
            tv == 0 && consistent,
            format!("{tv} violations, {errors} failed rows, median log2 slack {}", label(&tangent)),
        ),
        check(
            hv == 0 && consistent && secs < 900.0,
            format!("{hv} violations, median log2 slack {}, {secs:.1}s (< 900s)", label(&haus)),
        ),
    )
}

fn geometry() -> Outcome {
    let mesh = make_manifold("circle:r=1,n=2", 1000).unwrap();
    let id = [1.0, 0.0, 0.0, 1.0];
    let circle = hausdorff_measure(&mesh, &vec![&id[..]; mesh.len()]).unwrap();
    let circle_err = (circle - 2.0 * PI).abs();
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mut rot_err = 0.0f64;
    for _ in 0..20 {
        let th: f64 = rng.random_range(0.0..2.0 * PI);
        let r = [th.cos(), -th.sin(), th.sin(), th.cos()];
        let v = hausdorff_measure(&mesh, &vec![&r[..]; mesh.len()]).unwrap();
        rot_err = rot_err.max((v - circle).abs());
    }
    let sphere = make_manifold("sphere:r=1,n=3", 2000).unwrap();
    let id3 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    let base = hausdorff_measure(&sphere, &vec![&id3[..]; sphere.len()]).unwrap();
    for _ in 0..20 {
        let (a, b): (f64, f64) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..PI));
        // rotation about z by a, then about x by b
        let (ca, sa, cb, sb) = (a.cos(), a.sin(), b.cos(), b.sin());
        let r = [ca, -sa, 0.0, cb * sa, cb * ca, -sb, sb * sa, sb * ca, cb];
        let v = hausdorff_measure(&sphere, &vec![&r[..]; sphere.len()]).unwrap();
        rot_err = rot_err.max((v - base).abs());
    }
    let mut failed = 0;
    for _ in 0..10_000 {
        let m = rng.random_range(1..=4);
        let n = rng.random_range(m..=6);
        let vs: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let refs: Vec<&[f64]> = vs.iter().map(Vec::as_slice).collect();
        if !gram_hadamard_check(&refs) {
            failed += 1;
        }
    }
    check(
        circle_err < 1e-6 && rot_err < 1e-12 && failed == 0,
        format!("circle err {circle_err:.1e} (< 1e-6), rotation {rot_err:.1e} (< 1e-12), hadamard {failed}/10000 failed"),
    )
}

fn determinism() -> Outcome {
    let mut cfg = ExperimentConfig::new("sine", 0.75);
    cfg.experiment.steps = 256;
    cfg.experiment.replications = 16;
    cfg.experiment.seed = 77;
    cfg.manifold.points = 100;
    let render = |w: usize| {
        let rep = run_bound_experiment(&cfg, w).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        buf
    };
    let base = render(1);
    let same = [2, 3, 8, 1].iter().all(|&w| render(w) == base);
    check(same, format!("{} bytes, workers 1/2/3/8 and a repeat", base.len()))
}

fn main() {
    let mut failures = 0;
    let mut report = |id: usize, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {id:>2} {name}: {detail}");
    };
    report(1, "fbm covariance", fbm_covariance());
    report(2, "fractional calculus laws", fractional_laws());
    report(3, "zahle integral", zahle());
    report(4, "flow oracle", flow_oracle());
    report(5, "lemma flow estimate", lemma());
    report(6, "delta solver", delta_solver());
    let t0 = Instant::now();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let runs: Vec<(f64, BoundReport)> =
        [0.6, 0.75].iter().map(|&h| (h, run_bound_experiment(&certify_config(h), workers).unwrap())).collect();
    let (tangent, haus) = certify(&runs, t0.elapsed().as_secs_f64());
    report(7, "tangent growth bound", tangent);
    report(8, "hausdorff growth bound", haus);
    report(9, "geometry", geometry());
    report(10, "report determinism", determinism());
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
