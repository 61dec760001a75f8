use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundOptions, DeltaMode, HolderParams};
use crate::error::{Error, Result};
use crate::fbm::SamplingMethod;
use crate::flow::VectorFieldSet;
use crate::grid::TimeGrid;
use crate::manifold::{make_manifold, ManifoldMesh};

/// A bound-certification run, read from TOML:
///
/// ```toml
/// [experiment]
/// field = "sine:A=0.2,omega=1;1,channels=2"
/// hurst = 0.75
/// horizon = 1.0
/// steps = 1024
/// replications = 100
/// seed = 7
///
/// [manifold]
/// spec = "circle:r=1,n=2"
/// points = 500
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub manifold: ManifoldSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub field: String,
    pub hurst: f64,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub method: SamplingMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManifoldSection {
    pub spec: String,
    pub points: usize,
}

impl Default for ManifoldSection {
    fn default() -> Self {
        Self {
            spec: "circle:r=1,n=2".into(),
            points: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    #[serde(default, with = "mode_serde")]
    pub mode: DeltaMode,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub report: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_steps() -> usize {
    1024
}

fn default_replications() -> usize {
    100
}

mod mode_serde {
    use super::DeltaMode;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &DeltaMode, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&m.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DeltaMode, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything a run needs, resolved and validated.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub fields: VectorFieldSet,
    pub params: HolderParams,
    pub grid: TimeGrid,
    pub mesh: ManifoldMesh,
    pub options: BoundOptions,
}

impl ExperimentConfig {
    /// Defaults for the given field and Hurst parameter.
    pub fn new(field: &str, hurst: f64) -> Self {
        Self {
            experiment: ExperimentSection {
                field: field.to_string(),
                hurst,
                horizon: 1.0,
                steps: default_steps(),
                replications: default_replications(),
                seed: 0,
                method: SamplingMethod::Cholesky,
            },
            manifold: ManifoldSection::default(),
            bounds: BoundsSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        let e = &self.experiment;
        if e.replications == 0 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        let fields = VectorFieldSet::parse(&e.field)?;
        if !fields.is_conforming() {
            return Err(Error::Config(format!("field `{}` is not uniformly bounded", e.field)));
        }
        let params = match (self.bounds.epsilon, self.bounds.delta) {
            (None, None) => HolderParams::default_for(e.hurst)?,
            (eps, del) => {
                let d = HolderParams::default_for(e.hurst)?;
                HolderParams::new(e.hurst, eps.unwrap_or(d.epsilon()), del.unwrap_or(d.delta()))?
            }
        };
        let grid = TimeGrid::new(e.horizon, e.steps)?;
        let mesh = make_manifold(&self.manifold.spec, self.manifold.points)?;
        if mesh.ambient_dim() != fields.dim() {
            return Err(Error::Config(format!(
                "manifold lives in ℝ^{} but the field in ℝ^{}",
                mesh.ambient_dim(),
                fields.dim()
            )));
        }
        Ok(ResolvedExperiment {
            fields,
            params,
            grid,
            mesh,
            options: BoundOptions {
                mode: self.bounds.mode,
                ..BoundOptions::default()
            },
        })
    }
}
