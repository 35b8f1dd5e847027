use super::split::Setup;
use crate::autoenc::AeConfig;
use crate::bovw::BovwConfig;
use crate::error::{Error, Result};
use crate::learn::{Family, HyperParams};
use crate::pipeline::{DatasetVariant, PipelineConfig};
use crate::scene::GenConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

/// Every knob of a run in one JSON file. Missing fields take defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub generation: GenConfig,
    pub pipeline: PipelineConfig,
    pub bovw: BovwConfig,
    pub autoenc: AeConfig,
    pub setups: Vec<Setup>,
    pub datasets: Vec<DatasetVariant>,
    pub models: Vec<Family>,
    /// Per-family parameters replacing the defaults.
    pub hyperparams: BTreeMap<Family, HyperParams>,
    /// Select parameters from each family's grid on an inner split of every
    /// fold's training rows.
    pub tune: bool,
    pub folds: usize,
    pub test_fraction: f64,
    /// Refit codebooks inside every fold (otherwise one fit on the outer
    /// training split).
    pub bovw_per_fold: bool,
    /// Ratings from this rater only; `None` uses every rater.
    pub rater_id: Option<String>,
    pub rerate_subset: usize,
    pub rerate_rounds: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            generation: GenConfig::default(),
            pipeline: PipelineConfig::default(),
            bovw: BovwConfig::default(),
            autoenc: AeConfig::default(),
            setups: Setup::ALL.to_vec(),
            datasets: DatasetVariant::ALL.to_vec(),
            models: Family::ALL.to_vec(),
            hyperparams: BTreeMap::new(),
            tune: false,
            folds: 10,
            test_fraction: 0.3,
            bovw_per_fold: true,
            rater_id: None,
            rerate_subset: 300,
            rerate_rounds: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Error::json(path.display(), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self).expect("config serializes")).map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        self.generation.validate()?;
        if self.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(Error::Config("test_fraction must be in [0, 1)".into()));
        }
        for (f, hp) in &self.hyperparams {
            if hp.family() != *f {
                return Err(Error::Config(format!("hyperparams for {f} name family {}", hp.family())));
            }
        }
        Ok(())
    }

    pub fn hyperparams_for(&self, f: Family) -> HyperParams {
        self.hyperparams.get(&f).cloned().unwrap_or_else(|| HyperParams::defaults(f))
    }

    /// SHA-256 of the canonical JSON, first 16 hex digits.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex16(&Sha256::digest(json))
    }
}

pub(crate) fn hex16(bytes: &[u8]) -> String {
    bytes[..8].iter().map(|b| format!("{b:02x}")).collect()
}
