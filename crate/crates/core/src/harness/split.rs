use crate::error::{Error, Result};
use crate::learn::{stratified_folds, stratified_holdout};
use crate::targets::ClassLabel;
use serde::{Deserialize, Serialize};

/// Which merged classes a classification task uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setup {
    BN,
    BG,
    NG,
    BNG,
}

impl Setup {
    pub const ALL: [Setup; 4] = [Setup::BN, Setup::BG, Setup::NG, Setup::BNG];

    pub fn classes(self) -> &'static [ClassLabel] {
        use ClassLabel::*;
        match self {
            Setup::BN => &[Bad, Neutral],
            Setup::BG => &[Bad, Good],
            Setup::NG => &[Neutral, Good],
            Setup::BNG => &[Bad, Neutral, Good],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Setup::BN => "BN",
            Setup::BG => "BG",
            Setup::NG => "NG",
            Setup::BNG => "BNG",
        }
    }

    /// Rows whose label takes part; errors when one of the classes is absent.
    pub fn rows(self, labels: &[ClassLabel]) -> Result<Vec<usize>> {
        for c in self.classes() {
            if !labels.contains(c) {
                return Err(Error::Config(format!("setup {} has no {c} rows", self.as_str())));
            }
        }
        Ok((0..labels.len()).filter(|&i| self.classes().contains(&labels[i])).collect())
    }
}

impl std::fmt::Display for Setup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Setup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Setup::ALL
            .into_iter()
            .find(|x| x.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown setup {s:?}")))
    }
}

/// Row indices (into the labels passed to [`make_split`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Fold of each entry of `train`, same order.
    pub folds: Vec<usize>,
    pub n_folds: usize,
}

impl Split {
    /// Training rows outside fold `f`, and the rows of fold `f`.
    pub fn fold(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        let (mut fit, mut val) = (Vec::new(), Vec::new());
        for (&r, &k) in self.train.iter().zip(&self.folds) {
            if k == f { val.push(r) } else { fit.push(r) }
        }
        (fit, val)
    }

    /// Keeps only `rows` (sorted) in train and test, and deals fresh
    /// stratified folds over the remaining training rows.
    pub fn restrict(&self, rows: &[usize], labels: &[ClassLabel], seed: u64) -> Split {
        let keep = |v: &[usize]| v.iter().copied().filter(|r| rows.binary_search(r).is_ok()).collect::<Vec<_>>();
        let train = keep(&self.train);
        let test = keep(&self.test);
        let y: Vec<ClassLabel> = train.iter().map(|&r| labels[r]).collect();
        let folds = stratified_folds(&y, self.n_folds, seed);
        Split { train, test, folds, n_folds: self.n_folds }
    }
}

/// Stratified train/test split (test share `test_fraction`) with stratified
/// folds dealt over the training rows. Deterministic given `seed`.
pub fn make_split(labels: &[ClassLabel], test_fraction: f64, n_folds: usize, seed: u64) -> Split {
    let (train, test) = stratified_holdout(labels, test_fraction, seed);
    let y: Vec<ClassLabel> = train.iter().map(|&r| labels[r]).collect();
    let folds = stratified_folds(&y, n_folds, seed.wrapping_add(1));
    Split { train, test, folds, n_folds: n_folds.max(1) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    fn labels() -> Vec<ClassLabel> {
        (0..257).map(|i| [Bad, Neutral, Neutral, Good, Good][i % 5]).collect()
    }

    #[test]
    fn split_is_disjoint_and_balanced() {
        let y = labels();
        let s = make_split(&y, 0.3, 10, 1);
        assert_eq!(s.train.len() + s.test.len(), y.len());
        assert!(s.train.iter().all(|r| s.test.binary_search(r).is_err()));
        let mut sizes = vec![0usize; 10];
        s.folds.iter().for_each(|&f| sizes[f] += 1);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert_eq!(s, make_split(&y, 0.3, 10, 1));
        let test_bad = s.test.iter().filter(|&&r| y[r] == Bad).count() as f64;
        let all_bad = y.iter().filter(|&&c| c == Bad).count() as f64;
        assert!((test_bad - 0.3 * all_bad).abs() <= 1.0);
    }

    #[test]
    fn restriction_and_setup_rows() {
        let y = labels();
        let s = make_split(&y, 0.3, 10, 2);
        let rows = Setup::BG.rows(&y).unwrap();
        let r = s.restrict(&rows, &y, 3);
        assert!(r.train.iter().chain(&r.test).all(|&i| y[i] != Neutral));
        let (fit, val) = r.fold(0);
        assert_eq!(fit.len() + val.len(), r.train.len());
        assert!(Setup::BN.rows(&[Bad, Good]).is_err());
    }
}
