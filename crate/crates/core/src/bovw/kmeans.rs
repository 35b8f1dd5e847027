use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;

pub const MAX_ITERATIONS: usize = 100;
pub const TOLERANCE: f64 = 1e-6;

/// `k` centroids of dimension `dim`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub k: usize,
    pub dim: usize,
    pub centroids: Vec<Vec<f64>>,
    /// SHA-256 prefix of the training descriptors.
    pub fingerprint: String,
}

#[derive(Clone, Debug)]
pub struct KMeansFit {
    pub codebook: Codebook,
    /// Objective (sum of squared distances) after each assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

pub fn fingerprint(data: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in data {
        h.update(v.to_le_bytes());
    }
    let digest = h.finalize();
    digest[..12].iter().map(|b| format!("{b:02x}")).collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid (lowest index on ties) and its squared distance.
pub fn nearest(row: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(row, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn distinct_rows(data: &[f64], dim: usize, limit: usize) -> usize {
    let mut seen = BTreeSet::new();
    for row in data.chunks_exact(dim) {
        seen.insert(row.iter().map(|v| v.to_bits()).collect::<Vec<u64>>());
        if seen.len() >= limit {
            break;
        }
    }
    seen.len()
}

fn plus_plus_seed(rows: &[&[f64]], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![rows[rng.random_range(0..rows.len())].to_vec()];
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = rows.len() - 1;
        for (i, &d) in d2.iter().enumerate() {
            acc += d;
            if acc > target && d > 0.0 {
                pick = i;
                break;
            }
        }
        if d2[pick] == 0.0 {
            // rounding at the tail: fall back to the farthest row
            pick = (0..rows.len())
                .max_by(|&a, &b| d2[a].total_cmp(&d2[b]).then(b.cmp(&a)))
                .expect("rows");
        }
        let c = rows[pick].to_vec();
        for (slot, r) in d2.iter_mut().zip(rows) {
            *slot = slot.min(sq_dist(r, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Stops after [`MAX_ITERATIONS`] or once no centroid moves more than
/// [`TOLERANCE`]. Empty clusters keep their previous centroid.
pub fn kmeans(data: &[f64], dim: usize, k: usize, seed: u64) -> Result<KMeansFit> {
    if dim == 0 || data.len() % dim != 0 {
        return Err(Error::Dimension(format!(
            "descriptor buffer of {} values is not a multiple of {dim}",
            data.len()
        )));
    }
    let available = distinct_rows(data, dim, k.max(1));
    if k == 0 || available < k {
        return Err(Error::TooFewDescriptors { k, available });
    }
    let rows: Vec<&[f64]> = data.chunks_exact(dim).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_seed(&rows, k, &mut rng);

    let mut objective = Vec::new();
    let mut iterations = 0;
    loop {
        let assigned: Vec<(usize, f64)> = rows.par_iter().map(|r| nearest(r, &centroids)).collect();
        objective.push(assigned.iter().map(|a| a.1).sum());
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            break;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (r, &(j, _)) in rows.iter().zip(&assigned) {
            counts[j] += 1;
            for (s, v) in sums[j].iter_mut().zip(r.iter()) {
                *s += v;
            }
        }
        let mut movement = 0.0f64;
        for j in 0..k {
            if counts[j] == 0 {
                continue;
            }
            let updated: Vec<f64> = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            movement = movement.max(sq_dist(&updated, &centroids[j]).sqrt());
            centroids[j] = updated;
        }
        if movement <= TOLERANCE {
            break;
        }
    }
    Ok(KMeansFit {
        codebook: Codebook {
            k,
            dim,
            centroids,
            fingerprint: fingerprint(data),
        },
        objective,
        iterations,
    })
}
