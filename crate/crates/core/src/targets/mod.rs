//! Ratings, re-rating deviations, the convergence simulation and the
//! five-to-three class merge.

pub mod deviation;
pub mod queue;
pub mod records;
pub mod simulate;

pub use deviation::{deviation_distributions, ClassDeviation, DeviationDistribution, DEVIATION_GRID};
pub use queue::rerate_queue;
pub use records::{append_jsonl, read_jsonl, write_jsonl, RatingRecord};
pub use simulate::{format_table, simulate_convergence, ConvergedRatings};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Merged class. The derived order (Bad < Neutral < Good) is the tie-break
/// order used by every classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    Bad,
    Neutral,
    Good,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 3] = [ClassLabel::Bad, ClassLabel::Neutral, ClassLabel::Good];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<ClassLabel> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Bad => "Bad",
            ClassLabel::Neutral => "Neutral",
            ClassLabel::Good => "Good",
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClassLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown class {s:?}")))
    }
}

/// 1 → Bad; 2, 3 → Neutral; 4, 5 → Good.
pub fn merge_classes(rating: u8) -> Result<ClassLabel> {
    match rating {
        1 => Ok(ClassLabel::Bad),
        2 | 3 => Ok(ClassLabel::Neutral),
        4 | 5 => Ok(ClassLabel::Good),
        r => Err(Error::Config(format!("rating {r} outside 1..=5"))),
    }
}
