use rayon::prelude::*;

use super::config::{ExperimentConfig, ResolvedExperiment};
use super::report::{BoundReport, BoundRow, RowValues, Summary};
use crate::bounds::{
    compute_constants, hausdorff_growth_bound, lemma_check, tangent_growth_bound, BoundOptions,
};
use crate::error::{Error, Result};
use crate::fbm::FbmGenerator;
use crate::flow::integrate_flow;
use crate::manifold::measure_curve;
use crate::rng::derive_seed;

/// Run every replication and assemble the report. Rows are computed on a
/// pool of `workers` threads and kept in replication order, so the report
/// does not depend on the worker count.
pub fn run_bound_experiment(config: &ExperimentConfig, workers: usize) -> Result<BoundReport> {
    run_with_options(config, workers, None)
}

pub(crate) fn run_with_options(
    config: &ExperimentConfig,
    workers: usize,
    options: Option<BoundOptions>,
) -> Result<BoundReport> {
    let mut res = config.resolve()?;
    if let Some(o) = options {
        res.options = o;
    }
    let e = &config.experiment;
    let generator = FbmGenerator::new(res.grid, e.hurst, e.method)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|err| Error::Config(err.to_string()))?;
    let rows: Vec<BoundRow> = pool.install(|| {
        (0..e.replications)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(e.seed, r as u64);
                BoundRow {
                    path_id: r,
                    base_seed: e.seed,
                    derived_seed: seed,
                    outcome: replicate(&res, &generator, seed).map_err(|err| err.to_string()),
                }
            })
            .collect()
    });
    if rows.iter().all(|r| r.outcome.is_err()) {
        let first = rows[0].outcome.clone().err().unwrap_or_default();
        return Err(Error::AllFailed(first));
    }
    let summary = Summary::from_rows(&rows);
    Ok(BoundReport {
        config_toml: config.to_toml()?,
        channels: res.fields.channel_count(),
        rows,
        summary,
    })
}

/// One replication from its derived seed; also the way to reproduce a single row.
pub fn replicate(res: &ResolvedExperiment, generator: &FbmGenerator, seed: u64) -> Result<RowValues> {
    let fields = &res.fields;
    let params = res.params;
    let grid = *generator.grid();
    let horizon = grid.horizon();
    let path = generator.sample(fields.channel_count(), seed)?;
    let norms = (0..path.channel_count())
        .map(|c| path.holder_norm(c, params.beta()))
        .collect::<Result<Vec<_>>>()?;
    let c = compute_constants(params, fields, &norms, horizon, res.options)?;
    let push = measure_curve(&res.mesh, fields, &path)?;
    let tangent = tangent_growth_bound(&c, horizon, 1.0)?;
    let haus = hausdorff_growth_bound(
        &c,
        horizon,
        res.mesh.intrinsic_dim(),
        res.mesh.reference_measure(),
        res.mesh.ambient_dim(),
    )?;
    let lemma = if c.degenerate || c.delta < grid.step() {
        None
    } else {
        let traj = integrate_flow(fields, &path, res.mesh.point(0), 1)?;
        let rep = lemma_check(&traj, &c)?;
        Some((rep.max_ratio, rep.violations))
    };
    Ok(RowValues {
        horizon,
        hurst: params.hurst(),
        alpha: params.alpha(),
        beta: params.beta(),
        holder_norms: norms,
        delta: c.delta,
        p: c.p,
        c_t: c.c_t,
        s: c.s,
        kstar: c.kstar,
        tangent_bound_log2: tangent.log2,
        tangent_sup: push.tangent_sup_l1,
        hausdorff_bound_log2: haus.log2,
        hausdorff_sup: push.curve.sup(),
        lemma,
        c_t_pow_beta: c.c_t_pow_beta(),
        moment_rhs: c.moment_rhs(),
        moment_rhs_printed: c.moment_rhs_printed(),
    })
}
