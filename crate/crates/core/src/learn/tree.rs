//! CART trees. One presorted grower serves both the Gini classifier and the
//! second-order regression trees used by boosting.

use super::data::LabeledDataset;
use crate::targets::ClassLabel;
use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node<V> {
    Leaf(V),
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// Follows `x[feature] <= threshold` to the left.
pub fn leaf_of<'a, V>(nodes: &'a [Node<V>], row: &[f64]) -> &'a V {
    let mut i = 0;
    loop {
        match &nodes[i] {
            Node::Leaf(v) => return v,
            Node::Split { feature, threshold, left, right } => {
                i = if row[*feature] <= *threshold { *left } else { *right };
            }
        }
    }
}

pub fn depth<V>(nodes: &[Node<V>]) -> usize {
    fn go<V>(nodes: &[Node<V>], i: usize) -> usize {
        match &nodes[i] {
            Node::Leaf(_) => 0,
            Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
        }
    }
    if nodes.is_empty() { 0 } else { go(nodes, 0) }
}

/// What a grower needs to know about the targets.
pub(crate) trait Target {
    type Acc: Clone;
    type Leaf;
    fn zero(&self) -> Self::Acc;
    fn add(&self, acc: &mut Self::Acc, row: usize);
    fn diff(&self, total: &Self::Acc, left: &Self::Acc) -> Self::Acc;
    /// Higher is better.
    fn score(&self, left: &Self::Acc, right: &Self::Acc, total: &Self::Acc) -> f64;
    fn admissible(&self, left: &Self::Acc, right: &Self::Acc) -> bool;
    fn is_pure(&self, total: &Self::Acc) -> bool;
    fn min_score(&self) -> f64;
    fn merge(&self, acc: &mut Self::Acc, other: &Self::Acc);
    fn leaf(&self, total: &Self::Acc) -> Self::Leaf;
}

pub(crate) struct GrowParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features examined per split; `None` means all, in index order.
    pub max_features: Option<usize>,
}

/// Row order of every feature column over the whole matrix, ties by row
/// index.
struct Presorted(Vec<Vec<usize>>);

impl Presorted {
    fn new(x: ArrayView2<f64>) -> Self {
        Presorted(
            (0..x.ncols())
                .map(|f| {
                    let mut s: Vec<usize> = (0..x.nrows()).collect();
                    s.sort_by(|&a, &b| x[[a, f]].total_cmp(&x[[b, f]]).then(a.cmp(&b)));
                    s
                })
                .collect(),
        )
    }

    /// Per-feature sorted lists of `rows`, repeats kept adjacent.
    fn restrict(&self, rows: &[usize], n: usize) -> Vec<Vec<usize>> {
        let mut count = vec![0u32; n];
        for &r in rows {
            count[r] += 1;
        }
        self.0
            .iter()
            .map(|order| {
                let mut list = Vec::with_capacity(rows.len());
                for &r in order {
                    for _ in 0..count[r] {
                        list.push(r);
                    }
                }
                list
            })
            .collect()
    }
}

pub(crate) fn grow<T: Target>(
    x: ArrayView2<f64>,
    rows: &[usize],
    target: &T,
    p: &GrowParams,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Vec<Node<T::Leaf>> {
    let sorted = Presorted::new(x).restrict(rows, x.nrows());
    let rows_total = x.nrows();
    // column-major copy: split scans walk one feature at a time
    let cols: Vec<f64> = x.t().iter().copied().collect();
    let mut nodes = Vec::new();
    let mut g = Grower {
        cols,
        rows_total,
        left: vec![false; rows_total],
        target,
        p,
        nodes: &mut nodes,
        rng: rng.as_deref_mut(),
    };
    if rows.is_empty() {
        g.nodes.push(Node::Leaf(target.leaf(&target.zero())));
    } else {
        g.node(sorted, rows, 0);
    }
    nodes
}

struct Grower<'a, 'r, T: Target> {
    cols: Vec<f64>,
    rows_total: usize,
    /// Side of the current split, indexed by row.
    left: Vec<bool>,
    target: &'a T,
    p: &'a GrowParams,
    nodes: &'a mut Vec<Node<T::Leaf>>,
    rng: Option<&'r mut ChaCha8Rng>,
}

impl<T: Target> Grower<'_, '_, T> {
    fn node(&mut self, sorted: Vec<Vec<usize>>, rows: &[usize], depth: usize) -> usize {
        let t = self.target;
        let mut total = t.zero();
        for &r in rows {
            t.add(&mut total, r);
        }
        let id = self.nodes.len();
        let n = rows.len();
        let stop = t.is_pure(&total)
            || self.p.max_depth.is_some_and(|m| depth >= m)
            || n < 2 * self.p.min_samples_leaf.max(1);
        let split = if stop { None } else { self.best_split(&sorted, &total) };
        let Some((feature, threshold)) = split else {
            self.nodes.push(Node::Leaf(t.leaf(&total)));
            return id;
        };
        self.nodes.push(Node::Split { feature, threshold, left: 0, right: 0 });
        let col = &self.cols[feature * self.rows_total..(feature + 1) * self.rows_total];
        for &r in rows {
            self.left[r] = col[r] <= threshold;
        }
        let side = &self.left;
        let (mut ls, mut rs) = (Vec::with_capacity(sorted.len()), Vec::with_capacity(sorted.len()));
        for list in sorted {
            let (l, r): (Vec<usize>, Vec<usize>) = list.into_iter().partition(|&r| side[r]);
            ls.push(l);
            rs.push(r);
        }
        let (lrows, rrows): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| side[r]);
        let left = self.node(ls, &lrows, depth + 1);
        let right = self.node(rs, &rrows, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }

    fn best_split(&mut self, sorted: &[Vec<usize>], total: &T::Acc) -> Option<(usize, f64)> {
        let t = self.target;
        let d = sorted.len();
        let mut order: Vec<usize> = (0..d).collect();
        if let (Some(_), Some(rng)) = (self.p.max_features, self.rng.as_deref_mut()) {
            order.shuffle(rng);
        }
        let min_leaf = self.p.min_samples_leaf.max(1);
        let mut best: Option<(f64, usize, f64)> = None;
        for (checked, &f) in order.iter().enumerate() {
            // keep looking past the quota only while nothing valid was found
            if self.p.max_features.is_some_and(|m| checked >= m) && best.is_some() {
                break;
            }
            let list = &sorted[f];
            let col = &self.cols[f * self.rows_total..(f + 1) * self.rows_total];
            let n = list.len();
            let mut left = t.zero();
            for i in 0..n - 1 {
                t.add(&mut left, list[i]);
                let (a, b) = (col[list[i]], col[list[i + 1]]);
                if a >= b || i + 1 < min_leaf || n - i - 1 < min_leaf {
                    continue;
                }
                let right = t.diff(total, &left);
                if !t.admissible(&left, &right) {
                    continue;
                }
                let s = t.score(&left, &right, total);
                if s.is_finite() && best.is_none_or(|(bs, _, _)| s > bs) {
                    let mid = a + (b - a) / 2.0;
                    best = Some((s, f, if mid < b { mid } else { a }));
                }
            }
        }
        best.filter(|&(s, _, _)| s >= t.min_score()).map(|(_, f, thr)| (f, thr))
    }
}

/// Features cut into at most `max_bins` ordered bins at training-value
/// quantiles. A feature with no more distinct values than that gets one bin
/// per value, and binned growth then picks the same splits as the exact
/// grower.
pub(crate) struct Binned {
    n: usize,
    /// Column-major bin index per (feature, row).
    bins: Vec<u16>,
    /// Smallest and largest training value in each bin, per feature.
    lo: Vec<Vec<f64>>,
    hi: Vec<Vec<f64>>,
}

impl Binned {
    pub fn new(x: ArrayView2<f64>, max_bins: usize) -> Self {
        let max_bins = max_bins.clamp(2, u16::MAX as usize + 1);
        let (n, d) = x.dim();
        let mut bins = vec![0u16; n * d];
        let (mut lo, mut hi) = (Vec::with_capacity(d), Vec::with_capacity(d));
        for f in 0..d {
            let col = x.column(f);
            let mut v = col.to_vec();
            v.sort_by(f64::total_cmp);
            let mut distinct = v.clone();
            distinct.dedup();
            // lower edge of every bin but the first; each edge is a training value
            let edges: Vec<f64> = if distinct.len() <= max_bins {
                distinct.get(1..).unwrap_or_default().to_vec()
            } else {
                let mut e: Vec<f64> = (1..max_bins).map(|b| v[b * n / max_bins]).filter(|&c| c > v[0]).collect();
                e.dedup();
                e
            };
            let (mut l, mut h) = (vec![f64::INFINITY; edges.len() + 1], vec![f64::NEG_INFINITY; edges.len() + 1]);
            for (r, &val) in col.iter().enumerate() {
                let b = edges.partition_point(|&e| e <= val);
                bins[f * n + r] = b as u16;
                l[b] = l[b].min(val);
                h[b] = h[b].max(val);
            }
            lo.push(l);
            hi.push(h);
        }
        Binned { n, bins, lo, hi }
    }

    fn column(&self, f: usize) -> &[u16] {
        &self.bins[f * self.n..(f + 1) * self.n]
    }
}

/// Histogram grower over `Binned` features: each node sums the target per
/// bin and scans bin boundaries, so cost no longer grows with sorting.
pub(crate) fn grow_binned<T: Target>(
    b: &Binned,
    rows: &[usize],
    target: &T,
    p: &GrowParams,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Vec<Node<T::Leaf>> {
    let mut nodes = Vec::new();
    let mut g = BinnedGrower { b, target, p, nodes: &mut nodes, rng: rng.as_deref_mut() };
    if rows.is_empty() {
        g.nodes.push(Node::Leaf(target.leaf(&target.zero())));
    } else {
        g.node(rows, 0);
    }
    nodes
}

struct BinnedGrower<'a, 'r, T: Target> {
    b: &'a Binned,
    target: &'a T,
    p: &'a GrowParams,
    nodes: &'a mut Vec<Node<T::Leaf>>,
    rng: Option<&'r mut ChaCha8Rng>,
}

impl<T: Target> BinnedGrower<'_, '_, T> {
    fn node(&mut self, rows: &[usize], depth: usize) -> usize {
        let t = self.target;
        let mut total = t.zero();
        for &r in rows {
            t.add(&mut total, r);
        }
        let id = self.nodes.len();
        let stop = t.is_pure(&total)
            || self.p.max_depth.is_some_and(|m| depth >= m)
            || rows.len() < 2 * self.p.min_samples_leaf.max(1);
        let split = if stop { None } else { self.best_split(rows, &total) };
        let Some((feature, last_left, threshold)) = split else {
            self.nodes.push(Node::Leaf(t.leaf(&total)));
            return id;
        };
        self.nodes.push(Node::Split { feature, threshold, left: 0, right: 0 });
        let col = self.b.column(feature);
        let (lrows, rrows): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| col[r] as usize <= last_left);
        let left = self.node(&lrows, depth + 1);
        let right = self.node(&rrows, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }

    /// Best (feature, last bin on the left, threshold).
    fn best_split(&mut self, rows: &[usize], total: &T::Acc) -> Option<(usize, usize, f64)> {
        let t = self.target;
        let d = self.b.lo.len();
        let mut order: Vec<usize> = (0..d).collect();
        if let (Some(_), Some(rng)) = (self.p.max_features, self.rng.as_deref_mut()) {
            order.shuffle(rng);
        }
        let min_leaf = self.p.min_samples_leaf.max(1);
        let n = rows.len();
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for (checked, &f) in order.iter().enumerate() {
            if self.p.max_features.is_some_and(|m| checked >= m) && best.is_some() {
                break;
            }
            let (lo, hi) = (&self.b.lo[f], &self.b.hi[f]);
            let col = self.b.column(f);
            let mut hist = vec![t.zero(); lo.len()];
            let mut count = vec![0usize; lo.len()];
            for &r in rows {
                let bin = col[r] as usize;
                t.add(&mut hist[bin], r);
                count[bin] += 1;
            }
            let mut left = t.zero();
            let mut n_left = 0;
            let mut prev = None;
            for bin in (0..lo.len()).filter(|&bin| count[bin] > 0) {
                if let Some(pb) = prev {
                    if n_left >= min_leaf && n - n_left >= min_leaf {
                        let right = t.diff(total, &left);
                        if t.admissible(&left, &right) {
                            let s = t.score(&left, &right, total);
                            if s.is_finite() && best.is_none_or(|(bs, ..)| s > bs) {
                                let (a, b): (f64, f64) = (hi[pb], lo[bin]);
                                let mid = a + (b - a) / 2.0;
                                best = Some((s, f, pb, if mid < b { mid } else { a }));
                            }
                        }
                    }
                }
                t.merge(&mut left, &hist[bin]);
                n_left += count[bin];
                prev = Some(bin);
            }
        }
        best.filter(|&(s, ..)| s >= t.min_score()).map(|(_, f, pb, thr)| (f, pb, thr))
    }
}

/// Gini impurity over class indices (at most three classes).
pub(crate) struct Gini<'a> {
    pub y: &'a [usize],
    pub k: usize,
}

impl Target for Gini<'_> {
    type Acc = ([f64; 3], usize);
    type Leaf = Vec<f64>;
    fn zero(&self) -> Self::Acc {
        ([0.0; 3], 0)
    }
    fn add(&self, acc: &mut Self::Acc, row: usize) {
        acc.0[self.y[row]] += 1.0;
        acc.1 += 1;
    }
    fn diff(&self, total: &Self::Acc, left: &Self::Acc) -> Self::Acc {
        (std::array::from_fn(|c| total.0[c] - left.0[c]), total.1 - left.1)
    }
    fn merge(&self, acc: &mut Self::Acc, other: &Self::Acc) {
        for (a, b) in acc.0.iter_mut().zip(&other.0) {
            *a += b;
        }
        acc.1 += other.1;
    }
    /// Σc²/n over both children: the negated weighted Gini up to a constant.
    fn score(&self, l: &Self::Acc, r: &Self::Acc, _: &Self::Acc) -> f64 {
        let part = |a: &Self::Acc| a.0.iter().map(|c| c * c).sum::<f64>() / a.1 as f64;
        part(l) + part(r)
    }
    fn admissible(&self, _: &Self::Acc, _: &Self::Acc) -> bool {
        true
    }
    fn is_pure(&self, total: &Self::Acc) -> bool {
        total.0.iter().filter(|&&c| c > 0.0).count() <= 1
    }
    /// Zero-gain splits are allowed: XOR-like patterns need them.
    fn min_score(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn leaf(&self, total: &Self::Acc) -> Vec<f64> {
        let n = total.1.max(1) as f64;
        total.0[..self.k].iter().map(|c| c / n).collect()
    }
}

pub fn gini(counts: &[f64]) -> f64 {
    let n: f64 = counts.iter().sum();
    if n == 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|c| (c / n).powi(2)).sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: None, min_samples_leaf: 1, max_features: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub classes: Vec<ClassLabel>,
    pub nodes: Vec<Node<Vec<f64>>>,
}

impl DecisionTree {
    pub fn fit(data: &LabeledDataset, p: &TreeParams) -> Self {
        let rows: Vec<usize> = (0..data.len()).collect();
        Self::fit_rows(data, &rows, p, None)
    }

    /// Grows on `rows`, which may repeat (bootstrap samples).
    pub fn fit_rows(data: &LabeledDataset, rows: &[usize], p: &TreeParams, rng: Option<&mut ChaCha8Rng>) -> Self {
        let (classes, y) = data.encode();
        Self::fit_encoded(data.x.view(), &y, classes, rows, p, rng)
    }

    pub(crate) fn fit_encoded(
        x: ArrayView2<f64>,
        y: &[usize],
        classes: Vec<ClassLabel>,
        rows: &[usize],
        p: &TreeParams,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Self {
        debug_assert!(classes.len() <= 3);
        let target = Gini { y, k: classes.len() };
        let gp = GrowParams {
            max_depth: p.max_depth,
            min_samples_leaf: p.min_samples_leaf,
            max_features: p.max_features,
        };
        DecisionTree { nodes: grow(x, rows, &target, &gp, rng), classes }
    }

    /// Grows on binned features; `rows` may repeat.
    pub(crate) fn fit_binned(
        b: &Binned,
        y: &[usize],
        classes: Vec<ClassLabel>,
        rows: &[usize],
        p: &TreeParams,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Self {
        debug_assert!(classes.len() <= 3);
        let target = Gini { y, k: classes.len() };
        let gp = GrowParams {
            max_depth: p.max_depth,
            min_samples_leaf: p.min_samples_leaf,
            max_features: p.max_features,
        };
        DecisionTree { nodes: grow_binned(b, rows, &target, &gp, rng), classes }
    }

    /// Class frequencies in the reached leaf.
    pub fn predict_scores(&self, row: &[f64]) -> Vec<f64> {
        leaf_of(&self.nodes, row).clone()
    }

    pub fn depth(&self) -> usize {
        depth(&self.nodes)
    }
}
