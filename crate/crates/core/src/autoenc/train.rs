use super::layers::ConvParams;
use super::network::{flatten, NetworkParams, NetworkSpec};
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AeConfig {
    pub spec: NetworkSpec,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Share of the images held out as the fixed validation batch.
    pub validation_fraction: f64,
}

impl Default for AeConfig {
    fn default() -> Self {
        AeConfig {
            spec: NetworkSpec::default(),
            learning_rate: 1e-2,
            momentum: 0.9,
            batch_size: 32,
            epochs: 50,
            validation_fraction: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train: f64,
    pub validation: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Validation loss of the initial parameters.
    pub initial_validation: f64,
    pub epochs: Vec<EpochLoss>,
}

impl TrainReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epoch,train_loss,validation_loss")?;
        writeln!(w, "0,,{}", self.initial_validation)?;
        for e in &self.epochs {
            writeln!(w, "{},{},{}", e.epoch, e.train, e.validation)?;
        }
        Ok(())
    }
}

fn mean_loss(params: &NetworkParams, images: &[&[f64]]) -> f64 {
    let losses: Vec<f64> = images.par_iter().map(|im| params.loss(im)).collect();
    losses.iter().sum::<f64>() / images.len().max(1) as f64
}

/// Minibatch SGD with momentum on the mean squared reconstruction error.
///
/// Per-sample gradients run in parallel but are summed in batch order, so the
/// result depends only on the inputs and `seed`.
pub fn train(cfg: &AeConfig, images: &[Vec<f64>], seed: u64) -> Result<(NetworkParams, TrainReport)> {
    if images.is_empty() {
        return Err(Error::EmptyData("autoencoder training set".into()));
    }
    let side = cfg.spec.input_size;
    if let Some(bad) = images.iter().find(|im| im.len() != side * side) {
        return Err(Error::Dimension(format!(
            "image of {} values, expected {side}x{side}",
            bad.len()
        )));
    }
    let mut params = NetworkParams::init(&cfg.spec, seed)?;
    let n_val = if images.len() >= 2 {
        ((images.len() as f64 * cfg.validation_fraction).round() as usize).clamp(1, images.len() - 1)
    } else {
        0
    };
    let (train_set, val_set) = images.split_at(images.len() - n_val);
    let train_set: Vec<&[f64]> = train_set.iter().map(Vec::as_slice).collect();
    let val_set: Vec<&[f64]> = if val_set.is_empty() {
        train_set.clone()
    } else {
        val_set.iter().map(Vec::as_slice).collect()
    };

    let mut report = TrainReport {
        initial_validation: mean_loss(&params, &val_set),
        epochs: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut velocity = vec![0.0; params.num_params()];
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let batch = cfg.batch_size.max(1);
    let mut last_finite = None;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            let results: Vec<(f64, Vec<ConvParams>)> = chunk
                .par_iter()
                .map(|&i| params.loss_and_gradient(train_set[i]))
                .collect();
            let mut grad = vec![0.0; velocity.len()];
            for (loss, g) in &results {
                epoch_loss += loss;
                for (acc, v) in grad.iter_mut().zip(flatten(g)) {
                    *acc += v;
                }
            }
            let scale = 1.0 / chunk.len() as f64;
            let mut flat = params.flat();
            for ((w, v), g) in flat.iter_mut().zip(velocity.iter_mut()).zip(&grad) {
                *v = cfg.momentum * *v - cfg.learning_rate * g * scale;
                *w += *v;
            }
            params.set_flat(&flat);
        }
        let train_loss = epoch_loss / train_set.len() as f64;
        let validation = mean_loss(&params, &val_set);
        if !train_loss.is_finite() || !validation.is_finite() {
            return Err(Error::Divergence { epoch, last_finite });
        }
        last_finite = Some(epoch);
        report.epochs.push(EpochLoss {
            epoch,
            train: train_loss,
            validation,
        });
    }
    Ok((params, report))
}
