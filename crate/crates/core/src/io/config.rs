use crate::error::{Error, Result};
use crate::harness::{ExperimentConfig, KChoice};
use crate::interval::Method;
use crate::tail_model::HeavyTailLaw;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Keys accepted in a simulation config file.
pub const CONFIG_KEYS: [&str; 13] = [
    "family", "alpha", "beta", "scale", "n", "reps", "k", "n1", "B", "levels", "methods", "seed",
    "name",
];

/// A simulation config file. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Label for output files; defaults to the file stem.
    #[serde(default)]
    pub name: Option<String>,
    pub family: String,
    pub alpha: f64,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub scale: Option<f64>,
    pub n: usize,
    pub reps: usize,
    pub k: KChoice,
    #[serde(default)]
    pub n1: Option<usize>,
    #[serde(rename = "B", default = "default_resamples")]
    pub resamples: usize,
    pub levels: Vec<f64>,
    pub methods: Vec<Method>,
    pub seed: u64,
}

fn default_resamples() -> usize {
    1000
}

impl SimulateConfig {
    pub fn law(&self) -> Result<HeavyTailLaw> {
        let unexpected = |key: &str| {
            Error::Validation(format!("key {key:?} does not apply to family {:?}", self.family))
        };
        match self.family.to_ascii_lowercase().as_str() {
            "frechet" => {
                if self.beta.is_some() {
                    return Err(unexpected("beta"));
                }
                if self.scale.is_some() {
                    return Err(unexpected("scale"));
                }
                HeavyTailLaw::frechet(self.alpha)
            }
            "burr" => {
                if self.scale.is_some() {
                    return Err(unexpected("scale"));
                }
                let beta = self
                    .beta
                    .ok_or_else(|| Error::Validation("family \"burr\" requires beta".into()))?;
                HeavyTailLaw::burr(self.alpha, beta)
            }
            "pareto" => {
                if self.beta.is_some() {
                    return Err(unexpected("beta"));
                }
                HeavyTailLaw::pareto(self.alpha, self.scale.unwrap_or(1.0))
            }
            other => Err(Error::Validation(format!(
                "unknown family {other:?} (expected frechet, burr or pareto)"
            ))),
        }
        .map_err(|e| match e {
            Error::Domain(m) => Error::Validation(m),
            e => e,
        })
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let config = ExperimentConfig {
            law: self.law()?,
            n: self.n,
            reps: self.reps,
            k: self.k,
            n1: self.n1,
            resamples: self.resamples,
            levels: self.levels.clone(),
            methods: self.methods.clone(),
            seed: self.seed,
        };
        config.resolve().map_err(|e| match e {
            Error::Domain(m) => Error::Validation(m),
            e => e,
        })?;
        Ok(config)
    }
}

/// Parses config text.
pub fn parse_config(text: &str) -> Result<SimulateConfig> {
    toml::from_str(text).map_err(|e| {
        Error::Validation(format!(
            "invalid config: {}\nvalid keys: {}",
            e.message(),
            CONFIG_KEYS.join(", ")
        ))
    })
}

pub fn read_config(path: &Path) -> Result<SimulateConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
