use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use fbflow_core::bounds::DeltaMode;
use fbflow_core::experiment::{run_bound_experiment, selftest, ExperimentConfig, SelftestOptions};
use fbflow_core::fbm::{fmt_f64, read_path_csv, write_path, write_path_csv, FbmGenerator, FbmPath};
use fbflow_core::flow::{integrate_joint, VectorFieldSet};
use fbflow_core::fraccalc::{
    rl_integral, w_norm, weyl_derivative, zahle_integral, FracOrder, SampledFunction, Side, WNormConvention,
};
use fbflow_core::manifold::{make_manifold, measure_curve};
use fbflow_core::TimeGrid;

use crate::{
    Cli, Command, FlowArgs, FraccalcArgs, HausdorffArgs, Op, PathArgs, SampleArgs, SideArg, Usage, VerifyArgs,
};

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let workers = match cli.workers {
        Some(0) => return Err(usage("--workers must be at least 1")),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let config = base_config(cli)?;
    rayon::ThreadPoolBuilder::new().num_threads(workers).build_global().ok();
    match &cli.command {
        Command::SampleFbm(a) => sample_fbm(cli, config, a),
        Command::Fraccalc(a) => fraccalc(cli, a),
        Command::Flow(a) => flow(cli, config, a),
        Command::Hausdorff(a) => hausdorff(cli, config, a),
        Command::VerifyBound(a) => verify_bound(cli, config, a, workers),
        Command::Selftest(a) => {
            let opts = SelftestOptions {
                seed: cli.seed.unwrap_or(SelftestOptions::default().seed),
                workers,
                tamper_k1: a.tamper_k1,
            };
            let results = selftest(&mut io::stdout().lock(), &opts)?;
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} passed, {failed} failed", results.len() - failed);
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn as_usage(e: impl std::fmt::Display) -> anyhow::Error {
    usage(e.to_string())
}

fn base_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(as_usage)?,
        None => ExperimentConfig::new("sine", 0.75),
    };
    if let Some(s) = cli.seed {
        cfg.experiment.seed = s;
    }
    Ok(cfg)
}

fn apply_path_args(cfg: &mut ExperimentConfig, a: &PathArgs) -> Result<()> {
    let e = &mut cfg.experiment;
    if let Some(h) = a.hurst {
        e.hurst = h;
    }
    if let Some(t) = a.horizon {
        e.horizon = t;
    }
    if let Some(n) = a.grid {
        e.steps = n;
    }
    if let Some(m) = &a.method {
        e.method = m.parse().map_err(as_usage)?;
    }
    Ok(())
}

fn sample(cfg: &ExperimentConfig, channels: usize) -> Result<FbmPath> {
    let e = &cfg.experiment;
    let grid = TimeGrid::new(e.horizon, e.steps).map_err(as_usage)?;
    let gen = FbmGenerator::new(grid, e.hurst, e.method).map_err(as_usage)?;
    Ok(gen.sample(channels, e.seed)?)
}

fn parse_field(spec: &str) -> Result<VectorFieldSet> {
    VectorFieldSet::parse(spec).map_err(as_usage)
}

fn output(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_row(w: &mut dyn Write, values: impl IntoIterator<Item = f64>) -> io::Result<()> {
    let cells: Vec<String> = values.into_iter().map(fmt_f64).collect();
    writeln!(w, "{}", cells.join(","))
}

fn sample_fbm(cli: &Cli, mut cfg: ExperimentConfig, a: &SampleArgs) -> Result<ExitCode> {
    apply_path_args(&mut cfg, &a.path)?;
    let path = sample(&cfg, a.channels)?;
    match &cli.out {
        Some(p) => write_path(&path, p)?,
        None => write_path_csv(&path, io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn read_columns(p: &Path) -> Result<(Vec<String>, f64, f64, Vec<SampledFunction>)> {
    let file = File::open(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    let (header, mut cols) = read_path_csv(file).map_err(as_usage)?;
    if cols.len() < 2 || cols[0].len() < 2 {
        bail!(Usage("input needs a `t` column, one value column and two rows".into()));
    }
    let values = cols.split_off(1);
    let t = &cols[0];
    let (a, b) = (t[0], t[t.len() - 1]);
    let h = (b - a) / (t.len() - 1) as f64;
    if t.iter().enumerate().any(|(k, &tk)| (tk - (a + k as f64 * h)).abs() > 1e-9 * (b - a).abs().max(1.0)) {
        bail!(Usage("the `t` column must be a uniform grid".into()));
    }
    let fs = values
        .into_iter()
        .map(|v| SampledFunction::new(a, b, v).map_err(as_usage))
        .collect::<Result<Vec<_>>>()?;
    Ok((header, a, b, fs))
}

fn fraccalc(cli: &Cli, a: &FraccalcArgs) -> Result<ExitCode> {
    let (header, _, _, fs) = read_columns(&a.input)?;
    let side = match a.side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    };
    let order = FracOrder { alpha: a.alpha, side };
    let mut out = output(cli)?;
    match a.op {
        Op::Integral | Op::Derivative => {
            let results = fs
                .iter()
                .map(|f| match a.op {
                    Op::Integral => rl_integral(f, order),
                    _ => weyl_derivative(f, order),
                })
                .collect::<fbflow_core::Result<Vec<_>>>()?;
            writeln!(out, "{}", header.join(","))?;
            let times = fs[0].times();
            for (k, t) in times.iter().enumerate() {
                write_row(&mut out, std::iter::once(*t).chain(results.iter().map(|r| r.values()[k])))?;
            }
        }
        Op::Zahle => {
            if fs.len() != 2 {
                bail!(Usage("zahle needs exactly two value columns, f then g".into()));
            }
            let v = zahle_integral(&fs[0], &fs[1], a.alpha)?;
            writeln!(out, "alpha,integral")?;
            write_row(&mut out, [a.alpha, v])?;
        }
        Op::Wnorm => {
            let conv: WNormConvention = a.convention.parse().map_err(as_usage)?;
            writeln!(out, "column,alpha,w_norm")?;
            for (name, f) in header[1..].iter().zip(&fs) {
                writeln!(out, "{name},{},{}", fmt_f64(a.alpha), fmt_f64(w_norm(f, a.alpha, conv)?))?;
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn flow(cli: &Cli, mut cfg: ExperimentConfig, a: &FlowArgs) -> Result<ExitCode> {
    apply_path_args(&mut cfg, &a.path)?;
    let fields = parse_field(a.field.as_deref().unwrap_or(&cfg.experiment.field))?;
    let x0 = a
        .x0
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("--x0: {e}")))?;
    if x0.len() != fields.dim() {
        bail!(Usage(format!("--x0 has {} coordinates, the field lives in ℝ^{}", x0.len(), fields.dim())));
    }
    let path = sample(&cfg, fields.channel_count())?;
    let (traj, tangent) = integrate_joint(&fields, &path, &x0, None)?;
    let n = fields.dim();
    let mut out = output(cli)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend((1..=n).flat_map(|i| (1..=n).map(move |j| format!("J_{i}{j}"))));
    writeln!(out, "{}", header.join(","))?;
    let grid = traj.grid();
    for k in 0..grid.len() {
        let row = std::iter::once(grid.time(k))
            .chain(traj.state(k).iter().copied())
            .chain(tangent.jacobian(k).iter().copied());
        write_row(&mut out, row)?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn hausdorff(cli: &Cli, mut cfg: ExperimentConfig, a: &HausdorffArgs) -> Result<ExitCode> {
    apply_path_args(&mut cfg, &a.path)?;
    let fields = parse_field(a.field.as_deref().unwrap_or(&cfg.experiment.field))?;
    let spec = a.manifold.as_deref().unwrap_or(&cfg.manifold.spec);
    let mesh = make_manifold(spec, a.points.unwrap_or(cfg.manifold.points)).map_err(as_usage)?;
    if mesh.ambient_dim() != fields.dim() {
        bail!(Usage(format!(
            "manifold lives in ℝ^{}, the field in ℝ^{}",
            mesh.ambient_dim(),
            fields.dim()
        )));
    }
    let path = sample(&cfg, fields.channel_count())?;
    let push = measure_curve(&mesh, &fields, &path)?;
    let mut out = output(cli)?;
    writeln!(out, "t,measure_estimate")?;
    for (k, v) in push.curve.values.iter().enumerate() {
        write_row(&mut out, [push.curve.grid.time(k), *v])?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn verify_bound(cli: &Cli, mut cfg: ExperimentConfig, a: &VerifyArgs, workers: usize) -> Result<ExitCode> {
    apply_path_args(&mut cfg, &a.path)?;
    if let Some(f) = &a.field {
        cfg.experiment.field = f.clone();
    }
    if let Some(r) = a.replications {
        cfg.experiment.replications = r;
    }
    if let Some(m) = &a.manifold {
        cfg.manifold.spec = m.clone();
    }
    if let Some(p) = a.points {
        cfg.manifold.points = p;
    }
    if let Some(m) = &a.mode {
        cfg.bounds.mode = m.parse::<DeltaMode>().map_err(as_usage)?;
    }
    let target = cli
        .out
        .clone()
        .or_else(|| cfg.output.report.clone())
        .ok_or_else(|| usage("verify-bound needs --out or [output] report in the config"))?;
    cfg.resolve().map_err(as_usage)?;
    let report = run_bound_experiment(&cfg, workers)?;
    report.write(&target)?;
    let s = &report.summary;
    println!(
        "replications={} succeeded={} violations={} min_tangent_slack_log2={:.6} median_tangent_slack_log2={:.6} min_hausdorff_slack_log2={:.6} median_hausdorff_slack_log2={:.6}",
        s.replications,
        s.succeeded,
        s.violations,
        s.min_tangent_slack_log2,
        s.median_tangent_slack_log2,
        s.min_hausdorff_slack_log2,
        s.median_hausdorff_slack_log2,
    );
    Ok(if s.violations == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
