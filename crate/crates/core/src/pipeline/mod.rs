//! Column transforms, standardization, PCA/SVD extension and assembly of the
//! D1/D2/D3 matrices.
//!
//! Output column order is fixed: handcrafted (70), `pca_*` (30), `svd_*` (9),
//! then `ae_*` (169) for D2 and D1, then `bovw_*` (885) for D1 only.

pub mod plan;
pub mod projection;
pub mod transform;

pub use plan::{ColumnPlan, TransformPlan};
pub use projection::{ProjectionModel, PCA_COMPONENTS, SVD_COMPONENTS};
pub use transform::{
    boxcox_apply, boxcox_fit, boxcox_inverse, classify_distribution, remove_outliers,
    ColumnTransform, TransformKind, OUTLIER_Z,
};

use crate::error::{Error, Result};
use ndarray::{concatenate, Array2, Axis};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const PIPELINE_VERSION: &str = "pipeline/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetVariant {
    /// Everything.
    D1,
    /// No visual words.
    D2,
    /// Handcrafted plus projections only.
    D3,
}

impl DatasetVariant {
    pub const ALL: [DatasetVariant; 3] = [DatasetVariant::D1, DatasetVariant::D2, DatasetVariant::D3];

    pub fn uses_autoenc(self) -> bool {
        self != DatasetVariant::D3
    }

    pub fn uses_bovw(self) -> bool {
        self == DatasetVariant::D1
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetVariant::D1 => "d1",
            DatasetVariant::D2 => "d2",
            DatasetVariant::D3 => "d3",
        }
    }

    /// Output width for the default block sizes.
    pub fn width(self) -> usize {
        let mut w = crate::features::HANDCRAFTED_WIDTH + PCA_COMPONENTS + SVD_COMPONENTS;
        if self.uses_autoenc() {
            w += crate::autoenc::CODE_LEN;
        }
        if self.uses_bovw() {
            w += crate::bovw::BOVW_WIDTH;
        }
        w
    }
}

impl std::str::FromStr for DatasetVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d1" => Ok(DatasetVariant::D1),
            "d2" => Ok(DatasetVariant::D2),
            "d3" => Ok(DatasetVariant::D3),
            other => Err(Error::Config(format!("unknown dataset variant {other:?}"))),
        }
    }
}

impl std::fmt::Display for DatasetVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named block of columns, rows aligned with composition order.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub names: Vec<String>,
    pub data: Array2<f64>,
}

impl Block {
    pub fn new(names: Vec<String>, data: Array2<f64>) -> Result<Self> {
        if names.len() != data.ncols() {
            return Err(Error::Dimension(format!(
                "block has {} names for {} columns",
                names.len(),
                data.ncols()
            )));
        }
        Ok(Block { names, data })
    }

    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let d = names.len();
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension(format!("row of {} values for {d} columns", r.len())));
        }
        let data = Array2::from_shape_vec((rows.len(), d), rows.concat())
            .map_err(|e| Error::Dimension(e.to_string()))?;
        Ok(Block { names, data })
    }

    pub fn rows(&self, idx: &[usize]) -> Block {
        Block {
            names: self.names.clone(),
            data: self.data.select(Axis(0), idx),
        }
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }
}

/// Raw (untransformed) feature blocks for a set of compositions.
#[derive(Clone, Debug, PartialEq)]
pub struct RawFeatures {
    pub handcrafted: Block,
    pub autoenc: Option<Block>,
    pub bovw: Option<Block>,
}

impl RawFeatures {
    pub fn nrows(&self) -> usize {
        self.handcrafted.nrows()
    }

    pub fn rows(&self, idx: &[usize]) -> RawFeatures {
        RawFeatures {
            handcrafted: self.handcrafted.rows(idx),
            autoenc: self.autoenc.as_ref().map(|b| b.rows(idx)),
            bovw: self.bovw.as_ref().map(|b| b.rows(idx)),
        }
    }

    fn check(&self, variant: DatasetVariant) -> Result<()> {
        let n = self.nrows();
        for (needed, block, what) in [
            (variant.uses_autoenc(), &self.autoenc, "autoencoder"),
            (variant.uses_bovw(), &self.bovw, "visual-word"),
        ] {
            match block {
                None if needed => {
                    return Err(Error::Config(format!("{variant} needs the {what} block")))
                }
                Some(b) if needed && b.nrows() != n => {
                    return Err(Error::Dimension(format!(
                        "{what} block has {} rows, handcrafted has {n}",
                        b.nrows()
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub n_pca: usize,
    pub n_svd: usize,
    pub outlier_z: f64,
    /// Column name → forced transform.
    pub overrides: BTreeMap<String, TransformKind>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n_pca: PCA_COMPONENTS,
            n_svd: SVD_COMPONENTS,
            outlier_z: OUTLIER_Z,
            overrides: BTreeMap::new(),
        }
    }
}

/// Everything fitted on a training split to turn raw blocks into a model
/// matrix for one dataset variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    pub version: String,
    pub variant: DatasetVariant,
    pub handcrafted: TransformPlan,
    pub projection: ProjectionModel,
    pub autoenc: Option<TransformPlan>,
    pub bovw: Option<TransformPlan>,
}

impl FeaturePipeline {
    /// Fits on `train`; every statistic comes from these rows only. The
    /// projections see the transformed handcrafted block, so the 39 extension
    /// columns are the same for all three variants.
    pub fn fit(train: &RawFeatures, variant: DatasetVariant, cfg: &PipelineConfig) -> Result<Self> {
        train.check(variant)?;
        let fit_plan = |b: &Block| TransformPlan::fit(b.data.view(), &b.names, cfg.outlier_z, &cfg.overrides);
        let handcrafted = fit_plan(&train.handcrafted)?;
        let h = handcrafted.apply(train.handcrafted.data.view())?;
        let projection = ProjectionModel::fit(h.view(), cfg.n_pca, cfg.n_svd);
        let autoenc = match (&train.autoenc, variant.uses_autoenc()) {
            (Some(b), true) => Some(fit_plan(b)?),
            _ => None,
        };
        let bovw = match (&train.bovw, variant.uses_bovw()) {
            (Some(b), true) => Some(fit_plan(b)?),
            _ => None,
        };
        Ok(FeaturePipeline {
            version: PIPELINE_VERSION.to_string(),
            variant,
            handcrafted,
            projection,
            autoenc,
            bovw,
        })
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.handcrafted.columns.iter().map(|c| c.name.clone()).collect();
        names.extend(self.projection.column_names());
        for plan in [&self.autoenc, &self.bovw].into_iter().flatten() {
            names.extend(plan.columns.iter().map(|c| c.name.clone()));
        }
        names
    }

    pub fn width(&self) -> usize {
        self.handcrafted.width()
            + self.projection.width()
            + self.autoenc.as_ref().map_or(0, |p| p.width())
            + self.bovw.as_ref().map_or(0, |p| p.width())
    }

    pub fn apply(&self, raw: &RawFeatures) -> Result<Block> {
        raw.check(self.variant)?;
        let h = self.handcrafted.apply(raw.handcrafted.data.view())?;
        let mut parts = vec![self.projection.apply(h.view())];
        parts.insert(0, h);
        if let (Some(plan), Some(b)) = (&self.autoenc, &raw.autoenc) {
            parts.push(plan.apply(b.data.view())?);
        }
        if let (Some(plan), Some(b)) = (&self.bovw, &raw.bovw) {
            parts.push(plan.apply(b.data.view())?);
        }
        let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
        let data = concatenate(Axis(1), &views).map_err(|e| Error::Dimension(e.to_string()))?;
        Block::new(self.column_names(), data)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("pipeline serializes");
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let p: FeaturePipeline = serde_json::from_str(&text).map_err(|e| Error::json(path.display(), e))?;
        if p.version != PIPELINE_VERSION {
            return Err(Error::Config(format!(
                "{}: pipeline version {} (expected {PIPELINE_VERSION})",
                path.display(),
                p.version
            )));
        }
        Ok(p)
    }
}
