use std::io::Write;
use std::path::Path;

use crate::bounds::MomentShape;
use crate::error::{Error, Result};
use crate::fbm::fmt_f64;

/// Per-replication outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub path_id: usize,
    pub base_seed: u64,
    pub derived_seed: u64,
    pub outcome: std::result::Result<RowValues, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowValues {
    pub horizon: f64,
    pub hurst: f64,
    pub alpha: f64,
    pub beta: f64,
    pub holder_norms: Vec<f64>,
    pub delta: f64,
    pub p: f64,
    pub c_t: f64,
    pub s: f64,
    pub kstar: f64,
    pub tangent_bound_log2: f64,
    pub tangent_sup: f64,
    pub hausdorff_bound_log2: f64,
    pub hausdorff_sup: f64,
    /// `None` when Δ is shorter than a grid step.
    pub lemma: Option<(f64, usize)>,
    /// `(C_T)^β` and its pathwise majorants (corrected, as commonly printed).
    pub c_t_pow_beta: f64,
    pub moment_rhs: f64,
    pub moment_rhs_printed: f64,
}

impl RowValues {
    pub fn tangent_slack_log2(&self) -> f64 {
        self.tangent_bound_log2 - self.tangent_sup.log2()
    }

    pub fn hausdorff_slack_log2(&self) -> f64 {
        self.hausdorff_bound_log2 - self.hausdorff_sup.log2()
    }

    pub fn violated(&self) -> bool {
        self.tangent_slack_log2() < 0.0
            || self.hausdorff_slack_log2() < 0.0
            || self.lemma.is_some_and(|(_, v)| v > 0)
    }
}

impl BoundRow {
    pub fn status(&self) -> String {
        match &self.outcome {
            Ok(v) if v.violated() => "violation".into(),
            Ok(_) => "ok".into(),
            Err(e) => format!("error: {e}"),
        }
    }
}

/// Aggregates over the successful rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub replications: usize,
    pub succeeded: usize,
    pub failed: usize,
    pub violations: usize,
    pub min_tangent_slack_log2: f64,
    pub median_tangent_slack_log2: f64,
    pub min_hausdorff_slack_log2: f64,
    pub median_hausdorff_slack_log2: f64,
    pub lemma_checked: usize,
    pub lemma_max_ratio: f64,
    pub moment: MomentShape,
    /// Sample moments of `K*` of orders 1 to 4.
    pub kstar_moments: Vec<f64>,
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

impl Summary {
    pub fn from_rows(rows: &[BoundRow]) -> Self {
        let ok: Vec<&RowValues> = rows.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
        let ts: Vec<f64> = ok.iter().map(|v| v.tangent_slack_log2()).collect();
        let hs: Vec<f64> = ok.iter().map(|v| v.hausdorff_slack_log2()).collect();
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let k = ok.len().max(1) as f64;
        let moment = MomentShape {
            samples: ok.len(),
            mean_c_t_pow_beta: ok.iter().map(|v| v.c_t_pow_beta).sum::<f64>() / k,
            mean_rhs: ok.iter().map(|v| v.moment_rhs).sum::<f64>() / k,
            mean_rhs_printed: ok.iter().map(|v| v.moment_rhs_printed).sum::<f64>() / k,
        };
        let kstar: Vec<f64> = ok.iter().map(|v| v.kstar).collect();
        let lemma: Vec<f64> = ok.iter().filter_map(|v| v.lemma.map(|l| l.0)).collect();
        Self {
            replications: rows.len(),
            succeeded: ok.len(),
            failed: rows.len() - ok.len(),
            violations: ok.iter().filter(|v| v.violated()).count(),
            min_tangent_slack_log2: min(&ts),
            median_tangent_slack_log2: median(ts),
            min_hausdorff_slack_log2: min(&hs),
            median_hausdorff_slack_log2: median(hs),
            lemma_checked: lemma.len(),
            lemma_max_ratio: lemma.iter().copied().fold(0.0, f64::max),
            moment,
            kstar_moments: crate::bounds::sample_moments(&kstar, 4),
        }
    }

    /// `key=value` pairs in a fixed order.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let f = fmt_f64;
        let mut out = vec![
            ("replications", self.replications.to_string()),
            ("succeeded", self.succeeded.to_string()),
            ("failed", self.failed.to_string()),
            ("violations", self.violations.to_string()),
            ("min_tangent_slack_log2", f(self.min_tangent_slack_log2)),
            ("median_tangent_slack_log2", f(self.median_tangent_slack_log2)),
            ("min_hausdorff_slack_log2", f(self.min_hausdorff_slack_log2)),
            ("median_hausdorff_slack_log2", f(self.median_hausdorff_slack_log2)),
            ("lemma_paths_checked", self.lemma_checked.to_string()),
            ("lemma_max_ratio", f(self.lemma_max_ratio)),
            ("mean_c_t_pow_beta", f(self.moment.mean_c_t_pow_beta)),
            ("mean_moment_rhs", f(self.moment.mean_rhs)),
            ("moment_shape_holds", self.moment.holds().to_string()),
            ("mean_moment_rhs_printed", f(self.moment.mean_rhs_printed)),
            ("moment_shape_printed_holds", self.moment.holds_printed().to_string()),
        ];
        for (i, m) in self.kstar_moments.iter().enumerate() {
            const NAMES: [&str; 4] = ["kstar_moment_1", "kstar_moment_2", "kstar_moment_3", "kstar_moment_4"];
            out.push((NAMES[i], f(*m)));
        }
        out
    }
}

/// Rows keyed by replication index plus the resolved config and summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub config_toml: String,
    pub channels: usize,
    pub rows: Vec<BoundRow>,
    pub summary: Summary,
}

impl BoundReport {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["path_id", "base_seed", "derived_seed", "status", "T", "H", "alpha", "beta"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        h.extend((0..self.channels).map(|c| format!("holder_norm_{c}")));
        h.extend(
            [
                "delta",
                "p",
                "c_t",
                "s",
                "kstar",
                "tangent_bound",
                "tangent_bound_log2",
                "tangent_sup",
                "tangent_slack_log2",
                "hausdorff_bound",
                "hausdorff_bound_log2",
                "hausdorff_sup",
                "hausdorff_slack_log2",
                "lemma_max_ratio",
                "lemma_violations",
            ]
            .iter()
            .map(|s| s.to_string()),
        );
        h
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<report>", e);
        for line in self.config_toml.lines() {
            writeln!(out, "#{}{line}", if line.is_empty() { "" } else { " " }).map_err(io)?;
        }
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(self.header())?;
            for row in &self.rows {
                w.write_record(self.record(row))?;
            }
            w.flush().map_err(io)?;
        }
        for (k, v) in self.summary.fields() {
            writeln!(out, "# summary {k}={v}").map_err(io)?;
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    fn record(&self, row: &BoundRow) -> Vec<String> {
        let f = fmt_f64;
        let mut r = vec![
            row.path_id.to_string(),
            row.base_seed.to_string(),
            row.derived_seed.to_string(),
            row.status(),
        ];
        match &row.outcome {
            Ok(v) => {
                r.extend([f(v.horizon), f(v.hurst), f(v.alpha), f(v.beta)]);
                r.extend(v.holder_norms.iter().map(|x| f(*x)));
                r.extend([
                    f(v.delta),
                    f(v.p),
                    f(v.c_t),
                    f(v.s),
                    f(v.kstar),
                    f(v.tangent_bound_log2.exp2()),
                    f(v.tangent_bound_log2),
                    f(v.tangent_sup),
                    f(v.tangent_slack_log2()),
                    f(v.hausdorff_bound_log2.exp2()),
                    f(v.hausdorff_bound_log2),
                    f(v.hausdorff_sup),
                    f(v.hausdorff_slack_log2()),
                ]);
                match v.lemma {
                    Some((ratio, viol)) => r.extend([f(ratio), viol.to_string()]),
                    None => r.extend([String::new(), String::new()]),
                }
            }
            Err(_) => r.resize(self.header().len(), String::new()),
        }
        r
    }
}
