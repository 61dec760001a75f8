use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::path::FbmPath;
use super::sampler::SamplingMethod;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::RNG_NAME;

/// Sidecar written next to every exported path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMetadata {
    pub hurst: f64,
    pub steps: usize,
    pub horizon: f64,
    pub seed: u64,
    pub method: SamplingMethod,
    pub channels: usize,
    pub rng: String,
}

impl PathMetadata {
    pub fn of(path: &FbmPath) -> Self {
        Self {
            hurst: path.hurst,
            steps: path.grid.steps(),
            horizon: path.grid.horizon(),
            seed: path.seed,
            method: path.method,
            channels: path.channel_count(),
            rng: RNG_NAME.to_string(),
        }
    }

    pub fn sidecar_path(csv: &Path) -> PathBuf {
        let mut s = csv.as_os_str().to_owned();
        s.push(".meta.toml");
        PathBuf::from(s)
    }
}

/// Shortest fixed format carrying 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `t,channel_0,...` with 17 significant digits.
pub fn write_path_csv<W: Write>(path: &FbmPath, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((0..path.channel_count()).map(|c| format!("channel_{c}")));
    w.write_record(&header)?;
    for k in 0..path.grid.len() {
        let mut row = vec![fmt_f64(path.grid.time(k))];
        row.extend(path.channels.iter().map(|ch| fmt_f64(ch[k])));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Parse a headered numeric CSV into `(header, columns)`.
pub fn read_path_csv<R: Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::domain(format!("row {}: `{field}` is not a number", line + 2))
            })?;
            cols[c].push(v);
        }
    }
    Ok((header, cols))
}

/// Write the CSV and its `.meta.toml` sidecar.
pub fn write_path(path: &FbmPath, csv_path: &Path) -> Result<()> {
    let file = fs::File::create(csv_path).map_err(|e| Error::io(csv_path, e))?;
    write_path_csv(path, std::io::BufWriter::new(file))?;
    let meta = toml::to_string(&PathMetadata::of(path)).map_err(|e| Error::Config(e.to_string()))?;
    let side = PathMetadata::sidecar_path(csv_path);
    fs::write(&side, meta).map_err(|e| Error::io(side, e))?;
    Ok(())
}

/// Read a path written by [`write_path`].
pub fn read_path(csv_path: &Path) -> Result<FbmPath> {
    let side = PathMetadata::sidecar_path(csv_path);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: PathMetadata = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let file = fs::File::open(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let (_, mut cols) = read_path_csv(file)?;
    if cols.len() != meta.channels + 1 {
        return Err(Error::domain("column count disagrees with metadata"));
    }
    let channels = cols.split_off(1);
    let grid = TimeGrid::new(meta.horizon, meta.steps)?;
    FbmPath::from_values(grid, meta.hurst, channels, meta.seed, meta.method)
}
