use super::dataset::{autoenc_block, bovw_block, descriptor_sets, handcrafted_block};
use crate::autoenc::NetworkParams;
use crate::bovw::{BovwModel, DetectorConfig};
use crate::error::{Error, Result};
use crate::learn::{Classifier, Model};
use crate::pipeline::{FeaturePipeline, RawFeatures};
use crate::scene::Composition;
use crate::targets::ClassLabel;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const PREDICTOR_VERSION: u32 = 1;

/// Everything needed to score a new composition: the fitted feature
/// pipeline, the model, and the encoders its dataset variant uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predictor {
    pub version: u32,
    pub pipeline: FeaturePipeline,
    pub model: Model,
    pub autoenc: Option<NetworkParams>,
    pub bovw: Option<BovwModel>,
    pub detector: DetectorConfig,
}

impl Predictor {
    pub fn raw_features(&self, comps: &[Composition]) -> Result<RawFeatures> {
        let variant = self.pipeline.variant;
        let autoenc = match (&self.autoenc, variant.uses_autoenc()) {
            (Some(p), true) => Some(autoenc_block(p, comps)?),
            (None, true) => return Err(Error::Config("predictor lacks autoencoder weights".into())),
            _ => None,
        };
        let bovw = match (&self.bovw, variant.uses_bovw()) {
            (Some(m), true) => Some(bovw_block(m, &descriptor_sets(comps, &self.detector))?),
            (None, true) => return Err(Error::Config("predictor lacks codebooks".into())),
            _ => None,
        };
        Ok(RawFeatures { handcrafted: handcrafted_block(comps)?, autoenc, bovw })
    }

    /// Label and class scores for each composition.
    pub fn predict(&self, comps: &[Composition]) -> Result<Vec<(ClassLabel, Vec<(ClassLabel, f64)>)>> {
        let x = self.pipeline.apply(&self.raw_features(comps)?)?;
        Ok(x.data
            .rows()
            .into_iter()
            .map(|r| {
                let r = r.to_vec();
                let scores = self.model.predict_scores(&r);
                let named = self.model.classes().iter().copied().zip(scores).collect();
                (self.model.predict(&r), named)
            })
            .collect())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self).expect("predictor serializes")).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let p: Predictor = serde_json::from_str(&text).map_err(|e| Error::json(path.display(), e))?;
        if p.version != PREDICTOR_VERSION {
            return Err(Error::Config(format!("{}: predictor version {}", path.display(), p.version)));
        }
        Ok(p)
    }
}
