//! The experiment grid: setups × dataset variants × model families, with
//! 10-fold cross-validation on the training split and a held-out test score.

use super::config::{hex16, ExperimentConfig};
use super::dataset::bovw_block;
use super::report::{ArtifactRecord, CellResult, ExperimentReport};
use super::split::{make_split, Setup, Split};
use crate::bovw::{BovwModel, DescriptorSet};
use crate::error::{Error, Result};
use crate::learn::{train, tune, Classifier, LabeledDataset};
use crate::pipeline::{Block, DatasetVariant, FeaturePipeline, RawFeatures};
use crate::targets::ClassLabel;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

/// Raw material for a grid run, one row per labeled composition.
#[derive(Clone, Debug)]
pub struct GridInputs {
    pub ids: Vec<String>,
    pub labels: Vec<ClassLabel>,
    pub handcrafted: Block,
    /// Codes from an autoencoder trained on the outer training split only.
    pub autoenc: Option<Block>,
    /// Per-composition descriptors; codebooks are fitted inside the grid.
    pub descriptors: Option<Vec<DescriptorSet>>,
}

impl GridInputs {
    fn check(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::EmptyData("no labeled compositions".into()));
        }
        let ok = self.ids.len() == n
            && self.handcrafted.nrows() == n
            && self.autoenc.as_ref().is_none_or(|b| b.nrows() == n)
            && self.descriptors.as_ref().is_none_or(|d| d.len() == n);
        if !ok {
            return Err(Error::Dimension("grid inputs disagree on the number of rows".into()));
        }
        Ok(())
    }
}

/// The outer split shared by the grid and by autoencoder training.
pub fn outer_split(labels: &[ClassLabel], cfg: &ExperimentConfig) -> Split {
    make_split(labels, cfg.test_fraction, cfg.folds, cfg.seed)
}

fn rows_hash(rows: &[usize]) -> String {
    let mut h = Sha256::new();
    for r in rows {
        h.update((*r as u64).to_le_bytes());
    }
    hex16(&h.finalize())
}

/// One fit/evaluate pass: fold `k` of the CV, or the final train/test pass.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Stage {
    Fold(usize),
    Test,
}

impl Stage {
    fn name(self) -> String {
        match self {
            Stage::Fold(k) => format!("fold{k}"),
            Stage::Test => "test".into(),
        }
    }
}

struct StageResult {
    artifact: ArtifactRecord,
    /// Accuracy per model family, config order.
    accuracies: Vec<f64>,
    n_fit: usize,
    n_eval: usize,
}

fn codebooks(inputs: &GridInputs, fit: &[usize], cfg: &ExperimentConfig) -> Result<BovwModel> {
    let d = inputs.descriptors.as_ref().ok_or_else(|| Error::Config("d1 needs descriptors".into()))?;
    let sets: Vec<&DescriptorSet> = fit.iter().map(|&r| &d[r]).collect();
    BovwModel::fit(&sets, &cfg.bovw, cfg.seed)
}

#[allow(clippy::too_many_arguments)]
fn run_stage(
    inputs: &GridInputs,
    cfg: &ExperimentConfig,
    setup: Setup,
    variant: DatasetVariant,
    stage: Stage,
    fit: &[usize],
    eval: &[usize],
    shared_codebooks: Option<&BovwModel>,
) -> Result<StageResult> {
    let raw = |rows: &[usize], bovw: &Option<Block>| RawFeatures {
        handcrafted: inputs.handcrafted.rows(rows),
        autoenc: if variant.uses_autoenc() { inputs.autoenc.as_ref().map(|b| b.rows(rows)) } else { None },
        bovw: bovw.as_ref().map(|b| b.rows(rows)),
    };
    let mut fp = Sha256::new();
    let bovw = if variant.uses_bovw() {
        let model = match shared_codebooks {
            Some(m) => m.clone(),
            None => codebooks(inputs, fit, cfg)?,
        };
        for cb in &model.codebooks {
            fp.update(cb.fingerprint.as_bytes());
        }
        let d = inputs.descriptors.as_ref().expect("checked by codebooks");
        Some(bovw_block(&model, d)?)
    } else {
        None
    };
    let (raw_fit, raw_eval) = (raw(fit, &bovw), raw(eval, &bovw));
    let pipeline = FeaturePipeline::fit(&raw_fit, variant, &cfg.pipeline)?;
    fp.update(serde_json::to_vec(&pipeline).expect("pipeline serializes"));
    let x_fit = pipeline.apply(&raw_fit)?.data;
    let x_eval = pipeline.apply(&raw_eval)?.data;
    let y = |rows: &[usize]| rows.iter().map(|&r| inputs.labels[r]).collect::<Vec<_>>();
    let train_data = LabeledDataset::new(x_fit, y(fit))?;
    let eval_data = LabeledDataset::new(x_eval, y(eval))?;
    let seed = cfg.seed;
    let accuracies = cfg
        .models
        .par_iter()
        .map(|&f| {
            let hp = if cfg.tune { tune(f, &train_data, seed)? } else { cfg.hyperparams_for(f) };
            let model = train(&hp, &train_data, seed)?;
            Ok(crate::learn::accuracy(&model.predict_batch(eval_data.x.view()), &eval_data.y))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(StageResult {
        artifact: ArtifactRecord {
            setup,
            dataset: variant,
            stage: stage.name(),
            rows_hash: rows_hash(fit),
            fingerprint: hex16(&fp.finalize()),
        },
        accuracies,
        n_fit: fit.len(),
        n_eval: eval.len(),
    })
}

/// Runs every (setup, dataset, model) cell. All fitting inside a stage uses
/// that stage's training rows only; stages run in parallel and results are
/// collected in a fixed order, so the report is reproducible bit for bit.
pub fn run_grid(inputs: &GridInputs, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    inputs.check()?;
    cfg.validate()?;
    if cfg.datasets.iter().any(|v| v.uses_autoenc()) && inputs.autoenc.is_none() {
        return Err(Error::Config("d1/d2 need autoencoder codes".into()));
    }
    let outer = outer_split(&inputs.labels, cfg);
    let shared = if !cfg.bovw_per_fold && cfg.datasets.iter().any(|v| v.uses_bovw()) {
        Some(codebooks(inputs, &outer.train, cfg)?)
    } else {
        None
    };
    let mut cells = Vec::new();
    let mut artifacts = Vec::new();
    for (si, &setup) in cfg.setups.iter().enumerate() {
        let rows = setup.rows(&inputs.labels)?;
        let split = outer.restrict(&rows, &inputs.labels, cfg.seed.wrapping_add(si as u64 + 1));
        let mut stages: Vec<(Stage, Vec<usize>, Vec<usize>)> =
            (0..split.n_folds).map(|k| {
                let (fit, val) = split.fold(k);
                (Stage::Fold(k), fit, val)
            }).collect();
        stages.push((Stage::Test, split.train.clone(), split.test.clone()));
        for (_, fit, eval) in &stages {
            for c in setup.classes() {
                if !fit.iter().any(|&r| inputs.labels[r] == *c) {
                    return Err(Error::Config(format!("setup {setup}: a training fold has no {c} rows")));
                }
            }
            if eval.is_empty() {
                return Err(Error::Config(format!("setup {setup}: empty evaluation fold")));
            }
        }
        let jobs: Vec<(DatasetVariant, usize)> =
            cfg.datasets.iter().flat_map(|&v| (0..stages.len()).map(move |s| (v, s))).collect();
        let results = jobs
            .par_iter()
            .map(|&(v, s)| {
                let (stage, fit, eval) = &stages[s];
                run_stage(inputs, cfg, setup, v, *stage, fit, eval, shared.as_ref())
            })
            .collect::<Result<Vec<_>>>()?;
        for (vi, &variant) in cfg.datasets.iter().enumerate() {
            let block = &results[vi * stages.len()..(vi + 1) * stages.len()];
            let (folds, test) = block.split_at(block.len() - 1);
            let mut fp = Sha256::new();
            for r in block {
                fp.update(r.artifact.fingerprint.as_bytes());
            }
            let stage_fp = fp.finalize();
            for (mi, &family) in cfg.models.iter().enumerate() {
                let accs: Vec<f64> = folds.iter().map(|r| r.accuracies[mi]).collect();
                let n = accs.len() as f64;
                let mean = accs.iter().sum::<f64>() / n;
                let variance = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
                let mut h = Sha256::new();
                h.update(stage_fp);
                h.update(serde_json::to_vec(&cfg.hyperparams_for(family)).expect("params serialize"));
                cells.push(CellResult {
                    setup,
                    dataset: variant,
                    model: family,
                    mean,
                    variance,
                    test_accuracy: test[0].accuracies[mi],
                    fold_accuracies: accs,
                    n_train: test[0].n_fit,
                    n_test: test[0].n_eval,
                    fingerprint: hex16(&h.finalize()),
                });
            }
            artifacts.extend(block.iter().map(|r| r.artifact.clone()));
        }
    }
    Ok(ExperimentReport { config_fingerprint: cfg.fingerprint(), seed: cfg.seed, cells, artifacts })
}
