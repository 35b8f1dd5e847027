use crate::error::{Error, Result};
use crate::targets::ClassLabel;
use ndarray::{Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Feature rows with one label each.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub x: Array2<f64>,
    pub y: Vec<ClassLabel>,
}

impl LabeledDataset {
    pub fn new(x: Array2<f64>, y: Vec<ClassLabel>) -> Result<Self> {
        let d = LabeledDataset { x, y };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.nrows() != self.y.len() {
            return Err(Error::Dimension(format!(
                "{} feature rows but {} labels",
                self.x.nrows(),
                self.y.len()
            )));
        }
        if self.y.is_empty() {
            return Err(Error::EmptyData("no labeled rows".into()));
        }
        if let Some(v) = self.x.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { column: "<training matrix>".into(), value: *v });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            x: self.x.select(Axis(0), idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }

    /// Sorted distinct labels and each row's position in that list.
    pub fn encode(&self) -> (Vec<ClassLabel>, Vec<usize>) {
        let mut classes = self.y.clone();
        classes.sort();
        classes.dedup();
        let idx = self
            .y
            .iter()
            .map(|c| classes.binary_search(c).expect("label present"))
            .collect();
        (classes, idx)
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub fn row_slice<'a>(row: &'a ArrayView1<f64>) -> std::borrow::Cow<'a, [f64]> {
    match row.as_slice() {
        Some(s) => std::borrow::Cow::Borrowed(s),
        None => std::borrow::Cow::Owned(row.to_vec()),
    }
}

/// Stratified fold assignment by dealing: each class is shuffled and dealt
/// round-robin, continuing from the fold where the previous class stopped,
/// so fold sizes differ by at most one and per-class counts by at most one.
pub fn stratified_folds(y: &[ClassLabel], k: usize, seed: u64) -> Vec<usize> {
    let k = k.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; y.len()];
    let mut next = 0;
    for c in ClassLabel::ALL {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        members.shuffle(&mut rng);
        for i in members {
            fold[i] = next;
            next = (next + 1) % k;
        }
    }
    fold
}

/// Stratified holdout: roughly `fraction` of each class goes to the second
/// list. Both lists are sorted.
pub fn stratified_holdout(y: &[ClassLabel], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut keep, mut hold) = (Vec::new(), Vec::new());
    let mut carry = 0.0;
    for c in ClassLabel::ALL {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        members.shuffle(&mut rng);
        // running total keeps the overall share close to `fraction`
        let want = members.len() as f64 * fraction + carry;
        let n_hold = (want.round() as usize).min(members.len());
        carry = want - n_hold as f64;
        hold.extend_from_slice(&members[..n_hold]);
        keep.extend_from_slice(&members[n_hold..]);
    }
    keep.sort_unstable();
    hold.sort_unstable();
    (keep, hold)
}

pub fn accuracy(pred: &[ClassLabel], truth: &[ClassLabel]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    #[test]
    fn argmax_prefers_lowest_on_ties() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[2.0, 2.0]), 0);
    }

    #[test]
    fn folds_are_balanced() {
        let y: Vec<_> = (0..103).map(|i| [Bad, Neutral, Good][(i * i) % 3]).collect();
        let f = stratified_folds(&y, 10, 3);
        let mut sizes = [0usize; 10];
        for &k in &f {
            sizes[k] += 1;
        }
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for c in ClassLabel::ALL {
            let total = y.iter().filter(|&&l| l == c).count() as f64;
            for k in 0..10 {
                let n = (0..y.len()).filter(|&i| f[i] == k && y[i] == c).count() as f64;
                assert!((n - total / 10.0).abs() <= 1.0);
            }
        }
        assert_eq!(f, stratified_folds(&y, 10, 3));
    }

    #[test]
    fn holdout_is_disjoint_and_stratified() {
        let y: Vec<_> = (0..100).map(|i| if i < 30 { Bad } else { Good }).collect();
        let (a, b) = stratified_holdout(&y, 0.3, 1);
        assert_eq!(a.len() + b.len(), 100);
        assert_eq!(b.len(), 30);
        assert_eq!(b.iter().filter(|&&i| y[i] == Bad).count(), 9);
        assert!(a.iter().all(|i| !b.contains(i)));
    }

    #[test]
    fn encode_sorts_classes() {
        let d = LabeledDataset::new(Array2::zeros((3, 1)), vec![Good, Bad, Good]).unwrap();
        let (classes, idx) = d.encode();
        assert_eq!(classes, vec![Bad, Good]);
        assert_eq!(idx, vec![1, 0, 1]);
    }
}
