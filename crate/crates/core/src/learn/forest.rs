use super::data::{argmax, LabeledDataset};
use super::tree::{Binned, DecisionTree, TreeParams};
use crate::targets::ClassLabel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features per split; `None` means ⌊√d⌋ (at least 1).
    pub max_features: Option<usize>,
    /// Split candidates per feature (quantile bins).
    pub max_bins: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, bootstrap: true, max_depth: Some(8), min_samples_leaf: 1, max_features: None, max_bins: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub classes: Vec<ClassLabel>,
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Tree `t` draws its bootstrap sample and feature subsets from ChaCha
    /// stream `t`, so the forest is the same however trees are scheduled.
    pub fn fit(data: &LabeledDataset, p: &ForestParams, seed: u64) -> Self {
        let (classes, y) = data.encode();
        let n = data.len();
        let d = data.dim();
        let m = p.max_features.unwrap_or(((d as f64).sqrt().floor() as usize).max(1)).min(d.max(1));
        let tp = TreeParams { max_depth: p.max_depth, min_samples_leaf: p.min_samples_leaf, max_features: Some(m) };
        let binned = Binned::new(data.x.view(), p.max_bins);
        let trees = (0..p.n_trees.max(1))
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let rows: Vec<usize> = if p.bootstrap {
                    let mut r: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                    r.sort_unstable();
                    r
                } else {
                    (0..n).collect()
                };
                let tp = if m >= d { TreeParams { max_features: None, ..tp.clone() } } else { tp.clone() };
                DecisionTree::fit_binned(&binned, &y, classes.clone(), &rows, &tp, Some(&mut rng))
            })
            .collect();
        RandomForest { classes, trees }
    }

    /// Share of trees voting for each class, so the argmax is the mode of
    /// the tree predictions (ties to the lowest class).
    pub fn predict_scores(&self, row: &[f64]) -> Vec<f64> {
        let mut votes = vec![0.0; self.classes.len()];
        for t in &self.trees {
            votes[argmax(&t.predict_scores(row))] += 1.0;
        }
        let n = self.trees.len() as f64;
        votes.iter_mut().for_each(|v| *v /= n);
        votes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use ClassLabel::*;

    fn blobs(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Array2::zeros((n, 4));
        let mut y = Vec::new();
        for i in 0..n {
            let good = i % 2 == 0;
            for j in 0..4 {
                let c = if good && j < 2 { 1.5 } else { 0.0 };
                x[[i, j]] = c + rng.random::<f64>() * 2.0 - 1.0;
            }
            y.push(if good { Good } else { Bad });
        }
        LabeledDataset::new(x, y).unwrap()
    }

    #[test]
    fn one_tree_without_bootstrap_is_a_tree() {
        let d = blobs(60, 1);
        let f = RandomForest::fit(&d, &ForestParams { n_trees: 1, bootstrap: false, max_depth: None, max_features: Some(4), ..Default::default() }, 3);
        let t = DecisionTree::fit(&d, &TreeParams::default());
        for row in d.x.rows() {
            let r = row.as_slice().unwrap();
            assert_eq!(argmax(&f.predict_scores(r)), argmax(&t.predict_scores(r)));
        }
    }

    #[test]
    fn beats_majority_on_holdout() {
        let train = blobs(200, 2);
        let test = blobs(200, 3);
        let f = RandomForest::fit(&train, &ForestParams { n_trees: 30, ..Default::default() }, 5);
        let correct = test
            .x
            .rows()
            .into_iter()
            .zip(&test.y)
            .filter(|(r, y)| f.classes[argmax(&f.predict_scores(r.as_slice().unwrap()))] == **y)
            .count();
        assert!(correct as f64 / 200.0 > 0.8, "{correct}");
        assert_eq!(f, RandomForest::fit(&train, &ForestParams { n_trees: 30, ..Default::default() }, 5));
    }
}
