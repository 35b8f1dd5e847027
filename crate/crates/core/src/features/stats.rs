use serde::{Deserialize, Serialize};

/// Min, max, mean and population standard deviation of a list.
///
/// An empty list summarizes to all zeros so feature vectors keep a fixed
/// width.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

impl StatSummary {
    pub const FIELDS: [&'static str; 4] = ["min", "max", "mean", "std"];

    pub fn as_array(&self) -> [f64; 4] {
        [self.min, self.max, self.mean, self.std]
    }
}

pub fn summarize(xs: &[f64]) -> StatSummary {
    if xs.is_empty() {
        return StatSummary::default();
    }
    let n = xs.len() as f64;
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // rounding can push the mean of a constant list past its bounds
    let mean = (xs.iter().sum::<f64>() / n).clamp(min, max);
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    StatSummary {
        min,
        max,
        mean,
        std: var.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_cases() {
        assert_eq!(summarize(&[]), StatSummary::default());
        assert_eq!(
            summarize(&[2.0, 2.0, 2.0]),
            StatSummary { min: 2.0, max: 2.0, mean: 2.0, std: 0.0 }
        );
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!((s.min, s.max, s.mean), (1.0, 4.0, 2.5));
        assert!((s.std - 1.25f64.sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn summary_is_ordered(xs in prop::collection::vec(-1e6f64..1e6, 1..50)) {
            let s = summarize(&xs);
            prop_assert!(s.min <= s.mean && s.mean <= s.max);
            prop_assert!(s.std >= 0.0);
        }

        #[test]
        fn constant_lists_have_zero_spread(x in -1e3f64..1e3, n in 1usize..20) {
            let s = summarize(&vec![x; n]);
            prop_assert_eq!(s.mean, x);
            prop_assert!(s.std <= 1e-12 * x.abs().max(1.0));
        }
    }
}
