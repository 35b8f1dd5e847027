//! Bag of visual words: local gradient descriptors, k-means codebooks and
//! per-image word histograms.
//!
//! Codebooks are fitted on training descriptors only and then frozen.

mod descriptor;
mod kmeans;

pub use descriptor::{detect_describe, DescriptorSet, DetectorConfig, DESCRIPTOR_DIM};
pub use kmeans::{fingerprint, kmeans, nearest, Codebook, KMeansFit, MAX_ITERATIONS, TOLERANCE};

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Codebook sizes, one histogram block each.
pub const CODEBOOK_SIZES: [usize; 7] = [5, 10, 20, 50, 100, 200, 500];
pub const BOVW_WIDTH: usize = 885;
pub const CODEBOOK_FILE_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordHistogram {
    pub counts: Vec<u64>,
}

/// Increments the bin of each descriptor's nearest centroid.
pub fn histogram(d: &DescriptorSet, cb: &Codebook) -> WordHistogram {
    let mut counts = vec![0u64; cb.k];
    for row in d.rows() {
        counts[nearest(row, &cb.centroids).0] += 1;
    }
    WordHistogram { counts }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BovwConfig {
    pub detector: DetectorConfig,
    pub sizes: Vec<usize>,
    /// Training descriptors are subsampled to at most this many rows.
    pub max_training_descriptors: usize,
}

impl Default for BovwConfig {
    fn default() -> Self {
        BovwConfig {
            detector: DetectorConfig::default(),
            sizes: CODEBOOK_SIZES.to_vec(),
            max_training_descriptors: 20_000,
        }
    }
}

/// One frozen codebook per size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BovwModel {
    pub version: u32,
    pub codebooks: Vec<Codebook>,
}

impl BovwModel {
    pub fn fit(sets: &[&DescriptorSet], cfg: &BovwConfig, seed: u64) -> Result<Self> {
        let dim = sets.iter().map(|s| s.dim).find(|&d| d > 0).unwrap_or(DESCRIPTOR_DIM);
        let mut rows: Vec<&[f64]> = sets.iter().flat_map(|s| s.rows()).collect();
        if rows.len() > cfg.max_training_descriptors {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rows.shuffle(&mut rng);
            rows.truncate(cfg.max_training_descriptors);
        }
        let pooled: Vec<f64> = rows.concat();
        let codebooks = cfg
            .sizes
            .par_iter()
            .map(|&k| kmeans(&pooled, dim, k, seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)).map(|f| f.codebook))
            .collect::<Result<Vec<_>>>()?;
        Ok(BovwModel {
            version: CODEBOOK_FILE_VERSION,
            codebooks,
        })
    }

    pub fn width(&self) -> usize {
        self.codebooks.iter().map(|c| c.k).sum()
    }

    pub fn column_names(&self) -> Vec<String> {
        column_names(self.codebooks.iter().map(|c| c.k))
    }

    /// Concatenated histograms, one block per codebook.
    pub fn encode(&self, d: &DescriptorSet) -> Vec<f64> {
        self.codebooks
            .iter()
            .flat_map(|cb| histogram(d, cb).counts.into_iter().map(|c| c as f64))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self).expect("codebooks serialize");
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: BovwModel = serde_json::from_str(&text).map_err(|e| Error::json(path.display(), e))?;
        if m.version != CODEBOOK_FILE_VERSION {
            return Err(Error::Config(format!("unsupported codebook file version {}", m.version)));
        }
        Ok(m)
    }
}

pub fn column_names(sizes: impl IntoIterator<Item = usize>) -> Vec<String> {
    sizes
        .into_iter()
        .flat_map(|k| (0..k).map(move |i| format!("bovw_k{k}_bin{i}")))
        .collect()
}
