//! Gradient boosting on the softmax cross-entropy with second-order
//! regression trees (L2 leaf penalty, shrinkage).

use super::data::{argmax, LabeledDataset};
use super::tree::{grow_binned, leaf_of, Binned, GrowParams, Node, Target};
use crate::targets::ClassLabel;
use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbParams {
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    /// L2 penalty on leaf weights.
    pub lambda: f64,
    /// Minimum split gain.
    pub gamma: f64,
    pub min_child_weight: f64,
    /// Row fraction per round, drawn without replacement.
    pub subsample: f64,
    /// Split candidates per feature (quantile bins).
    pub max_bins: usize,
}

impl Default for GbParams {
    fn default() -> Self {
        GbParams { rounds: 100, learning_rate: 0.1, max_depth: 3, lambda: 1.0, gamma: 0.0, min_child_weight: 1e-3, subsample: 1.0, max_bins: 256 }
    }
}

/// Gradient/hessian sums; leaf weight is -G / (H + λ).
pub(crate) struct Newton<'a> {
    pub g: &'a [f64],
    pub h: &'a [f64],
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
}

impl Target for Newton<'_> {
    type Acc = (f64, f64);
    type Leaf = f64;
    fn zero(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn add(&self, acc: &mut (f64, f64), row: usize) {
        acc.0 += self.g[row];
        acc.1 += self.h[row];
    }
    fn diff(&self, t: &(f64, f64), l: &(f64, f64)) -> (f64, f64) {
        (t.0 - l.0, t.1 - l.1)
    }
    fn merge(&self, acc: &mut (f64, f64), other: &(f64, f64)) {
        acc.0 += other.0;
        acc.1 += other.1;
    }
    fn score(&self, l: &(f64, f64), r: &(f64, f64), t: &(f64, f64)) -> f64 {
        let s = |a: &(f64, f64)| a.0 * a.0 / (a.1 + self.lambda);
        s(l) + s(r) - s(t)
    }
    fn admissible(&self, l: &(f64, f64), r: &(f64, f64)) -> bool {
        l.1 >= self.min_child_weight && r.1 >= self.min_child_weight
    }
    fn is_pure(&self, _: &(f64, f64)) -> bool {
        false
    }
    fn min_score(&self) -> f64 {
        self.gamma
    }
    fn leaf(&self, t: &(f64, f64)) -> f64 {
        -t.0 / (t.1 + self.lambda)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node<f64>>,
}

impl RegressionTree {
    /// Fits on all rows of `x` against per-row gradients and hessians.
    pub fn fit(x: ArrayView2<f64>, g: &[f64], h: &[f64], p: &GbParams) -> Self {
        let rows: Vec<usize> = (0..x.nrows()).collect();
        Self::fit_rows(&Binned::new(x, p.max_bins), &rows, g, h, p)
    }

    fn fit_rows(b: &Binned, rows: &[usize], g: &[f64], h: &[f64], p: &GbParams) -> Self {
        let target = Newton { g, h, lambda: p.lambda, gamma: p.gamma, min_child_weight: p.min_child_weight };
        let gp = GrowParams { max_depth: Some(p.max_depth), min_samples_leaf: 1, max_features: None };
        RegressionTree { nodes: grow_binned(b, rows, &target, &gp, None) }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        *leaf_of(&self.nodes, row)
    }
}

/// One boosting round: a tree per class and the step actually taken.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub trees: Vec<RegressionTree>,
    /// learning rate × backtracking factor.
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosting {
    pub classes: Vec<ClassLabel>,
    pub base: Vec<f64>,
    pub stages: Vec<Stage>,
    /// Mean training loss before round 0 and after each round.
    pub loss_history: Vec<f64>,
}

fn softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    z.iter_mut().for_each(|v| *v /= s);
}

/// Mean cross-entropy of raw scores `f` (row-major n × k).
pub fn softmax_loss(f: &[f64], y: &[usize], k: usize) -> f64 {
    let mut total = 0.0;
    for (i, &c) in y.iter().enumerate() {
        let z = &f[i * k..(i + 1) * k];
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        total += lse - z[c];
    }
    total / y.len() as f64
}

/// Per-class gradients and hessians of the softmax loss, class-major.
pub fn softmax_grad_hess(f: &[f64], y: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = y.len();
    let mut g = vec![vec![0.0; n]; k];
    let mut h = vec![vec![0.0; n]; k];
    let mut p = vec![0.0; k];
    for i in 0..n {
        p.copy_from_slice(&f[i * k..(i + 1) * k]);
        softmax_in_place(&mut p);
        for c in 0..k {
            let t = if y[i] == c { 1.0 } else { 0.0 };
            g[c][i] = p[c] - t;
            h[c][i] = (p[c] * (1.0 - p[c])).max(1e-16);
        }
    }
    (g, h)
}

const MAX_HALVINGS: usize = 30;

impl GradientBoosting {
    pub fn fit(data: &LabeledDataset, p: &GbParams, seed: u64) -> Self {
        let (classes, y) = data.encode();
        let k = classes.len();
        let n = data.len();
        let x = data.x.view();
        // log class priors
        let base: Vec<f64> = (0..k)
            .map(|c| (y.iter().filter(|&&v| v == c).count() as f64 / n as f64).ln())
            .collect();
        let mut f: Vec<f64> = (0..n).flat_map(|_| base.iter().copied()).collect();
        let mut loss = softmax_loss(&f, &y, k);
        let mut loss_history = vec![loss];
        let mut stages = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let binned = Binned::new(x, p.max_bins);
        for _ in 0..p.rounds {
            let (g, h) = softmax_grad_hess(&f, &y, k);
            let rows: Vec<usize> = if p.subsample < 1.0 {
                let m = ((n as f64 * p.subsample).round() as usize).clamp(1, n);
                let mut r = sample(&mut rng, n, m).into_vec();
                r.sort_unstable();
                r
            } else {
                (0..n).collect()
            };
            let trees: Vec<RegressionTree> =
                (0..k).map(|c| RegressionTree::fit_rows(&binned, &rows, &g[c], &h[c], p)).collect();
            let delta: Vec<f64> = (0..n)
                .flat_map(|i| {
                    let row = x.row(i);
                    let row = row.as_slice().map(|s| s.to_vec()).unwrap_or_else(|| row.to_vec());
                    trees.iter().map(move |t| t.predict(&row)).collect::<Vec<_>>()
                })
                .collect();
            // backtrack until the full training loss does not go up
            let mut step = p.learning_rate;
            let mut accepted = None;
            for _ in 0..=MAX_HALVINGS {
                let trial: Vec<f64> = f.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
                let l = softmax_loss(&trial, &y, k);
                if l <= loss {
                    accepted = Some((trial, l));
                    break;
                }
                step /= 2.0;
            }
            let Some((nf, nl)) = accepted else { break };
            f = nf;
            loss = nl;
            loss_history.push(loss);
            stages.push(Stage { trees, step });
        }
        GradientBoosting { classes, base, stages, loss_history }
    }

    pub fn raw_scores(&self, row: &[f64]) -> Vec<f64> {
        let mut z = self.base.clone();
        for s in &self.stages {
            for (zc, t) in z.iter_mut().zip(&s.trees) {
                *zc += s.step * t.predict(row);
            }
        }
        z
    }

    /// Class probabilities.
    pub fn predict_scores(&self, row: &[f64]) -> Vec<f64> {
        let mut z = self.raw_scores(row);
        softmax_in_place(&mut z);
        z
    }

    pub fn predict_index(&self, row: &[f64]) -> usize {
        argmax(&self.predict_scores(row))
    }
}
