//! Majority baseline, naive voting and stacked generalization.

use super::data::{argmax, stratified_folds, LabeledDataset};
use super::{train, Classifier, HyperParams, Model};
use crate::error::Result;
use crate::targets::ClassLabel;
use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Predicts the most frequent training class; scores are class priors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorityModel {
    pub classes: Vec<ClassLabel>,
    pub priors: Vec<f64>,
}

impl MajorityModel {
    pub fn fit(data: &LabeledDataset) -> Self {
        let (classes, y) = data.encode();
        let mut priors = vec![0.0; classes.len()];
        for &c in &y {
            priors[c] += 1.0;
        }
        priors.iter_mut().for_each(|p| *p /= y.len() as f64);
        MajorityModel { classes, priors }
    }
}

/// Rearranges a model's scores onto `classes`; classes the model never saw
/// score 0.
pub fn aligned_scores(model: &Model, classes: &[ClassLabel], row: &[f64]) -> Vec<f64> {
    let s = model.predict_scores(row);
    let own = model.classes();
    classes
        .iter()
        .map(|c| own.iter().position(|o| o == c).map_or(0.0, |i| s[i]))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoteModel {
    pub classes: Vec<ClassLabel>,
    pub members: Vec<Model>,
}

/// Votes per class with the tie-break folded in: the integer part counts
/// votes, the fractional part (< 1) ranks classes by summed member scores,
/// and equal sums keep the lower class first. The argmax is therefore the
/// majority, then the higher score sum, then the lower class.
pub fn vote_scores(members: &[Model], classes: &[ClassLabel], row: &[f64]) -> Vec<f64> {
    let k = classes.len();
    let mut votes = vec![0.0; k];
    let mut sums = vec![0.0; k];
    for m in members {
        let s = aligned_scores(m, classes, row);
        votes[argmax(&s)] += 1.0;
        sums.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
    let mut scores = votes;
    for (rank, &c) in order.iter().enumerate() {
        scores[c] += (k - rank) as f64 / (k + 1) as f64;
    }
    scores
}

/// Majority over member predictions, ties by summed scores, then by the
/// lower class.
pub fn vote(members: &[Model], row: &[f64]) -> ClassLabel {
    let mut classes: Vec<ClassLabel> = members.iter().flat_map(|m| m.classes().to_vec()).collect();
    classes.sort();
    classes.dedup();
    classes[argmax(&vote_scores(members, &classes, row))]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoteParams {
    pub members: Vec<HyperParams>,
}

impl VoteModel {
    pub fn fit(data: &LabeledDataset, p: &VoteParams, seed: u64) -> Result<Self> {
        let (classes, _) = data.encode();
        let members = p
            .members
            .par_iter()
            .enumerate()
            .map(|(i, hp)| train(hp, data, seed.wrapping_add(i as u64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VoteModel { classes, members })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackParams {
    pub members: Vec<HyperParams>,
    pub meta: Box<HyperParams>,
    pub folds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StackingModel {
    pub classes: Vec<ClassLabel>,
    /// Refit on all training rows.
    pub members: Vec<Model>,
    pub meta: Box<Model>,
}

/// Which rows trained the model that produced each meta-feature row.
#[derive(Clone, Debug, PartialEq)]
pub struct StackingAudit {
    pub fold_of_row: Vec<usize>,
    pub fold_train_rows: Vec<Vec<usize>>,
}

impl StackingAudit {
    /// True when no row's meta-features came from a model trained on it.
    pub fn leak_free(&self) -> bool {
        self.fold_of_row
            .iter()
            .enumerate()
            .all(|(r, &f)| self.fold_train_rows[f].binary_search(&r).is_err())
    }
}

impl StackingModel {
    fn meta_row(members: &[Model], classes: &[ClassLabel], row: &[f64]) -> Vec<f64> {
        members.iter().flat_map(|m| aligned_scores(m, classes, row)).collect()
    }

    /// Out-of-fold member scores train the meta-learner; members are then
    /// refit on everything for inference.
    pub fn fit(data: &LabeledDataset, p: &StackParams, seed: u64) -> Result<(Self, StackingAudit)> {
        let (classes, _) = data.encode();
        let k = classes.len();
        let folds = p.folds.clamp(2, data.len().max(2));
        let fold_of_row = stratified_folds(&data.y, folds, seed);
        let fold_train_rows: Vec<Vec<usize>> = (0..folds)
            .map(|f| (0..data.len()).filter(|&r| fold_of_row[r] != f).collect())
            .collect();
        let width = p.members.len() * k;
        let jobs: Vec<(usize, usize)> = (0..folds).flat_map(|f| (0..p.members.len()).map(move |m| (f, m))).collect();
        let fitted = jobs
            .par_iter()
            .map(|&(f, m)| {
                let sub = data.subset(&fold_train_rows[f]);
                train(&p.members[m], &sub, seed.wrapping_add((f * p.members.len() + m) as u64 + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut meta_x = Array2::zeros((data.len(), width));
        for (&(f, m), model) in jobs.iter().zip(&fitted) {
            for r in (0..data.len()).filter(|&r| fold_of_row[r] == f) {
                let row = data.x.row(r).to_vec();
                for (j, v) in aligned_scores(model, &classes, &row).into_iter().enumerate() {
                    meta_x[[r, m * k + j]] = v;
                }
            }
        }
        let meta_data = LabeledDataset { x: meta_x, y: data.y.clone() };
        let meta = train(&p.meta, &meta_data, seed)?;
        let members = p
            .members
            .par_iter()
            .enumerate()
            .map(|(m, hp)| train(hp, data, seed.wrapping_add(m as u64)))
            .collect::<Result<Vec<_>>>()?;
        Ok((
            StackingModel { classes, members, meta: Box::new(meta) },
            StackingAudit { fold_of_row, fold_train_rows },
        ))
    }

    pub fn predict_scores(&self, row: &[f64]) -> Vec<f64> {
        let z = Self::meta_row(&self.members, &self.classes, row);
        aligned_scores(&self.meta, &self.classes, &z)
    }
}
