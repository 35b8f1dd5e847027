use super::records::RatingRecord;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Deviation support: -4, -3.5, …, 4.
pub const DEVIATION_GRID: [f64; 17] = {
    let mut g = [0.0; 17];
    let mut i = 0;
    while i < 17 {
        g[i] = -4.0 + 0.5 * i as f64;
        i += 1;
    }
    g
};

const ZERO_INDEX: usize = 8;

/// Index of the grid point nearest to `d` (halves away from zero).
pub fn grid_index(d: f64) -> usize {
    ((d * 2.0).round() + ZERO_INDEX as f64).clamp(0.0, 16.0) as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassDeviation {
    pub mass: Vec<f64>,
    /// Re-rated compositions behind this class.
    pub samples: usize,
    /// True when no data existed and the class was set to "no change".
    pub degenerate: bool,
}

impl ClassDeviation {
    pub fn at_zero(degenerate: bool) -> Self {
        let mut mass = vec![0.0; 17];
        mass[ZERO_INDEX] = 1.0;
        ClassDeviation { mass, samples: 0, degenerate }
    }

    pub fn mean(&self) -> f64 {
        self.mass.iter().zip(DEVIATION_GRID).map(|(p, d)| p * d).sum()
    }
}

/// Per initial class 1..=5, the distribution of how far re-ratings moved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationDistribution {
    pub classes: Vec<ClassDeviation>,
}

impl DeviationDistribution {
    pub fn degenerate() -> Self {
        DeviationDistribution {
            classes: (0..5).map(|_| ClassDeviation::at_zero(false)).collect(),
        }
    }

    /// Builds from explicit masses, one row of 17 per class.
    pub fn from_masses(masses: [[f64; 17]; 5]) -> Result<Self> {
        let d = DeviationDistribution {
            classes: masses
                .iter()
                .map(|m| ClassDeviation { mass: m.to_vec(), samples: 0, degenerate: false })
                .collect(),
        };
        d.validate()?;
        Ok(d)
    }

    /// `c` in 1..=5.
    pub fn class(&self, c: u8) -> &ClassDeviation {
        &self.classes[c as usize - 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.len() != 5 {
            return Err(Error::Config(format!("{} deviation classes, expected 5", self.classes.len())));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if c.mass.len() != 17 || c.mass.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
                return Err(Error::Config(format!("class {}: masses must be 17 finite non-negatives", i + 1)));
            }
            let total: f64 = c.mass.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!("class {}: masses sum to {total}", i + 1)));
            }
        }
        Ok(())
    }
}

/// Empirical deviation distributions from the records of one rater (or all
/// raters when `rater` is `None`). A composition contributes once: the mean
/// of its re-ratings minus its initial rating, snapped to the 0.5 grid.
pub fn deviation_distributions(records: &[RatingRecord], rater: Option<&str>) -> DeviationDistribution {
    let mut initial: BTreeMap<(&str, &str), u8> = BTreeMap::new();
    let mut later: BTreeMap<(&str, &str), Vec<u8>> = BTreeMap::new();
    for r in records.iter().filter(|r| rater.is_none_or(|id| r.rater_id == id)) {
        let key = (r.composition_id.as_str(), r.rater_id.as_str());
        if r.round == 0 {
            initial.entry(key).or_insert(r.rating);
        } else {
            later.entry(key).or_default().push(r.rating);
        }
    }
    let mut counts = [[0usize; 17]; 5];
    for (key, rs) in &later {
        let Some(&c) = initial.get(key) else { continue };
        let mean = rs.iter().map(|&v| v as f64).sum::<f64>() / rs.len() as f64;
        counts[c as usize - 1][grid_index(mean - c as f64)] += 1;
    }
    DeviationDistribution {
        classes: counts
            .iter()
            .map(|row| {
                let n: usize = row.iter().sum();
                if n == 0 {
                    ClassDeviation::at_zero(true)
                } else {
                    ClassDeviation {
                        mass: row.iter().map(|&k| k as f64 / n as f64).collect(),
                        samples: n,
                        degenerate: false,
                    }
                }
            })
            .collect(),
    }
}
