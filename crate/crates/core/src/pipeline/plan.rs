use super::transform::{classify_distribution, mean_std, outlier_bounds, ColumnTransform, OUTLIER_Z};
use crate::error::{Error, Result};
use ndarray::{Array2, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Fitted treatment of one column: transform, clip to the outlier bounds
/// (in transformed space), then standardize.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnPlan {
    pub name: String,
    pub transform: ColumnTransform,
    pub clip: [f64; 2],
    pub mean: f64,
    /// 1.0 for constant columns so they map to zero.
    pub std: f64,
}

impl ColumnPlan {
    pub fn apply(&self, x: f64) -> f64 {
        (self.transform.apply(x).clamp(self.clip[0], self.clip[1]) - self.mean) / self.std
    }

    /// Undoes standardization and the transform. Clipped values stay clipped.
    pub fn inverse(&self, z: f64) -> f64 {
        self.transform.inverse(z * self.std + self.mean)
    }
}

/// Per-column plans for one feature block. Serialized next to the feature
/// CSV; editing `transform` in the JSON and refitting with the override map
/// is how a human corrects a misclassified column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformPlan {
    pub columns: Vec<ColumnPlan>,
}

fn json_f64_bound(v: f64) -> f64 {
    // JSON has no infinities; an unbounded clip is stored as ±f64::MAX
    v.clamp(f64::MIN, f64::MAX)
}

impl TransformPlan {
    /// Fits on the rows of `x` (the training split). `overrides` maps a
    /// column name to a transform kind that skips classification.
    pub fn fit(
        x: ArrayView2<f64>,
        names: &[String],
        outlier_z: f64,
        overrides: &BTreeMap<String, super::transform::TransformKind>,
    ) -> Result<Self> {
        if x.ncols() != names.len() {
            return Err(Error::Dimension(format!(
                "{} columns but {} names",
                x.ncols(),
                names.len()
            )));
        }
        if x.nrows() == 0 {
            return Err(Error::EmptyData("transform plan needs training rows".into()));
        }
        if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                column: names[i % x.ncols()].clone(),
                value: *v,
            });
        }
        let columns = (0..x.ncols())
            .into_par_iter()
            .map(|j| {
                let xs: Vec<f64> = x.column(j).to_vec();
                let kind = overrides
                    .get(&names[j])
                    .copied()
                    .unwrap_or_else(|| classify_distribution(&xs));
                let transform = ColumnTransform::fit(kind, &xs);
                let ys: Vec<f64> = xs.iter().map(|&v| transform.apply(v)).collect();
                let (lo, hi) = outlier_bounds(&ys, outlier_z);
                let clipped: Vec<f64> = ys.iter().map(|v| v.clamp(lo, hi)).collect();
                let (mean, std) = mean_std(&clipped);
                ColumnPlan {
                    name: names[j].clone(),
                    transform,
                    clip: [json_f64_bound(lo), json_f64_bound(hi)],
                    mean,
                    std: if std > 0.0 { std } else { 1.0 },
                }
            })
            .collect();
        Ok(TransformPlan { columns })
    }

    pub fn fit_default(x: ArrayView2<f64>, names: &[String]) -> Result<Self> {
        Self::fit(x, names, OUTLIER_Z, &BTreeMap::new())
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn apply(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.columns.len() {
            return Err(Error::Dimension(format!(
                "plan has {} columns, input has {}",
                self.columns.len(),
                x.ncols()
            )));
        }
        let mut out = x.to_owned();
        out.axis_iter_mut(Axis(0)).into_par_iter().for_each(|mut row| {
            for (v, p) in row.iter_mut().zip(&self.columns) {
                *v = p.apply(*v);
            }
        });
        Ok(out)
    }

    pub fn inverse(&self, z: ArrayView2<f64>) -> Array2<f64> {
        let mut out = z.to_owned();
        for mut row in out.rows_mut() {
            for (v, p) in row.iter_mut().zip(&self.columns) {
                *v = p.inverse(*v);
            }
        }
        out
    }
}
