use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Stochastic flows driven by fractional Brownian motion, and certification
/// of their Hausdorff-measure growth bounds.
#[derive(Debug, Parser)]
#[command(name = "fbflow", version)]
struct Cli {
    /// Experiment config (TOML); command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "FBFLOW_WORKERS")]
    workers: Option<usize>,
    /// Output file; CSV goes to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample fBm paths and export them with a metadata sidecar.
    SampleFbm(SampleArgs),
    /// Apply a fractional operator to columns of a CSV.
    Fraccalc(FraccalcArgs),
    /// Integrate one flow trajectory with its Jacobian.
    Flow(FlowArgs),
    /// Hausdorff measure of a transported manifold over time.
    Hausdorff(HausdorffArgs),
    /// Monte Carlo certification of the tangent and Hausdorff bounds.
    VerifyBound(VerifyArgs),
    /// Reduced property suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct PathArgs {
    /// Hurst parameter.
    #[arg(long = "H")]
    hurst: Option<f64>,
    /// Horizon.
    #[arg(long = "T")]
    horizon: Option<f64>,
    /// Number of grid steps.
    #[arg(long)]
    grid: Option<usize>,
    /// `cholesky` or `circulant`.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    path: PathArgs,
    /// Independent channels.
    #[arg(long, default_value_t = 1)]
    channels: usize,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Op {
    Integral,
    Derivative,
    Zahle,
    Wnorm,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Args)]
struct FraccalcArgs {
    #[arg(long, value_enum)]
    op: Op,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "left")]
    side: SideArg,
    /// Input CSV: a uniform `t` column followed by value columns.
    #[arg(long = "in")]
    input: PathBuf,
    /// W-norm kernel: `standard` or `printed`.
    #[arg(long, default_value = "standard")]
    convention: String,
}

#[derive(Debug, Args)]
struct FlowArgs {
    /// Field spec or preset name.
    #[arg(long)]
    field: Option<String>,
    /// Initial point, comma separated.
    #[arg(long)]
    x0: String,
    #[command(flatten)]
    path: PathArgs,
}

#[derive(Debug, Args)]
struct HausdorffArgs {
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    field: Option<String>,
    #[command(flatten)]
    path: PathArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    points: Option<usize>,
    /// `majorant` or `exact`.
    #[arg(long)]
    mode: Option<String>,
    #[command(flatten)]
    path: PathArgs,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, hide = true)]
    tamper_k1: bool,
}

/// Errors that are the caller's fault; they exit with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
