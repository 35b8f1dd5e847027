use super::deviation::{DeviationDistribution, DEVIATION_GRID};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergedRatings {
    /// Indexed by old class − 1.
    pub values: Vec<f64>,
    /// Standard error of each value across trials.
    pub std_errors: Vec<f64>,
    pub rounds: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Class whose deviations drive the next step: the current value rounded,
/// halves up.
pub fn current_class(x: f64) -> u8 {
    (x + 0.5).floor().clamp(1.0, 5.0) as u8
}

fn draw(mass: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 8;
    for (i, &p) in mass.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return DEVIATION_GRID[i];
            }
        }
    }
    // rounding left u above the cumulative total
    DEVIATION_GRID[last]
}

/// Time-average of one chain over rounds `rounds/2 .. rounds`.
fn trajectory_average(dist: &DeviationDistribution, start: u8, rounds: usize, rng: &mut ChaCha8Rng) -> f64 {
    let burn_in = rounds / 2;
    let mut x = start as f64;
    let mut sum = 0.0;
    for r in 0..rounds {
        let d = draw(&dist.class(current_class(x)).mass, rng);
        x = (x + d).clamp(1.0, 5.0);
        if r >= burn_in {
            sum += x;
        }
    }
    sum / (rounds - burn_in) as f64
}

/// Monte Carlo estimate of the long-run rating for each old class. Trial `t`
/// of class `c` uses its own ChaCha stream, so results do not depend on
/// thread scheduling.
pub fn simulate_convergence(dist: &DeviationDistribution, rounds: usize, trials: usize, seed: u64) -> ConvergedRatings {
    let rounds = rounds.max(1);
    let trials = trials.max(1);
    let mut values = Vec::with_capacity(5);
    let mut std_errors = Vec::with_capacity(5);
    for c in 1..=5u8 {
        let avgs: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((c as u64) << 40) | t as u64);
                trajectory_average(dist, c, rounds, &mut rng)
            })
            .collect();
        let n = avgs.len() as f64;
        let mean = avgs.iter().sum::<f64>() / n;
        let var = if avgs.len() > 1 {
            avgs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        values.push(mean);
        std_errors.push((var / n).sqrt());
    }
    ConvergedRatings { values, std_errors, rounds, trials, seed }
}

/// Two-column table: old class and its converged value.
pub fn format_table(c: &ConvergedRatings) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Old class  Converged value  Std. error");
    for (i, (v, e)) in c.values.iter().zip(&c.std_errors).enumerate() {
        let _ = writeln!(s, "{:>9}  {:>15.2}  {:>10.4}", i + 1, v, e);
    }
    let _ = writeln!(s, "({} rounds, {} trials, seed {})", c.rounds, c.trials, c.seed);
    s
}
