//! Experiment grid, reports, configuration and the rating service.

pub mod config;
pub mod dataset;
pub mod grid;
pub mod predictor;
pub mod report;
pub mod service;
pub mod split;

pub use config::ExperimentConfig;
pub use dataset::{
    autoenc_block, autoenc_images, bovw_block, descriptor_sets, handcrafted_block, labels_from_ratings, load_corpus,
    save_corpus,
};
pub use grid::{outer_split, run_grid, GridInputs};
pub use predictor::Predictor;
pub use report::{bovw_class_means, bovw_class_means_csv, render_report, ArtifactRecord, CellResult, ExperimentReport};
pub use service::{router, serve, AppState, ServiceConfig};
pub use split::{make_split, Setup, Split};

use crate::autoenc::{self, NetworkParams};
use crate::bovw::BovwModel;
use crate::error::{Error, Result};
use crate::learn::{train, tune, Family, LabeledDataset};
use crate::pipeline::{DatasetVariant, FeaturePipeline, RawFeatures};
use crate::scene::Composition;
use crate::targets::ClassLabel;

/// Keeps the labeled compositions, in corpus order.
pub fn labeled(comps: &[Composition], labels: &[Option<ClassLabel>]) -> (Vec<Composition>, Vec<ClassLabel>) {
    comps.iter().zip(labels).filter_map(|(c, l)| l.map(|l| (c.clone(), l))).unzip()
}

/// Extracts everything the requested variants need. The autoencoder, if
/// any, sees only the outer training split; it is returned for reuse.
pub fn prepare_inputs(
    comps: &[Composition],
    labels: &[ClassLabel],
    cfg: &ExperimentConfig,
    pretrained: Option<NetworkParams>,
) -> Result<(GridInputs, Option<NetworkParams>)> {
    if comps.len() != labels.len() {
        return Err(Error::Dimension("one label per composition expected".into()));
    }
    let handcrafted = handcrafted_block(comps)?;
    let net = if cfg.datasets.iter().any(|v| v.uses_autoenc()) {
        Some(match pretrained {
            Some(p) => p,
            None => {
                let split = outer_split(labels, cfg);
                let train_comps: Vec<Composition> = split.train.iter().map(|&r| comps[r].clone()).collect();
                let images = autoenc_images(&train_comps, cfg.autoenc.spec.input_size);
                autoenc::train(&cfg.autoenc, &images, cfg.seed)?.0
            }
        })
    } else {
        None
    };
    let autoenc = net.as_ref().map(|p| autoenc_block(p, comps)).transpose()?;
    let descriptors =
        cfg.datasets.iter().any(|v| v.uses_bovw()).then(|| descriptor_sets(comps, &cfg.bovw.detector));
    let inputs = GridInputs {
        ids: comps.iter().map(|c| c.id.clone()).collect(),
        labels: labels.to_vec(),
        handcrafted,
        autoenc,
        descriptors,
    };
    Ok((inputs, net))
}

/// Fits one deployable predictor on every labeled composition.
pub fn fit_predictor(
    comps: &[Composition],
    labels: &[ClassLabel],
    variant: DatasetVariant,
    family: Family,
    cfg: &ExperimentConfig,
    net: Option<NetworkParams>,
) -> Result<Predictor> {
    let cfg = ExperimentConfig { datasets: vec![variant], ..cfg.clone() };
    let (inputs, net) = prepare_inputs(comps, labels, &cfg, net)?;
    let bovw = match &inputs.descriptors {
        Some(d) => Some(BovwModel::fit(&d.iter().collect::<Vec<_>>(), &cfg.bovw, cfg.seed)?),
        None => None,
    };
    let raw = RawFeatures {
        handcrafted: inputs.handcrafted,
        autoenc: inputs.autoenc,
        bovw: match (&bovw, &inputs.descriptors) {
            (Some(m), Some(d)) => Some(bovw_block(m, d)?),
            _ => None,
        },
    };
    let pipeline = FeaturePipeline::fit(&raw, variant, &cfg.pipeline)?;
    let data = LabeledDataset::new(pipeline.apply(&raw)?.data, labels.to_vec())?;
    let hp = if cfg.tune { tune(family, &data, cfg.seed)? } else { cfg.hyperparams_for(family) };
    let model = train(&hp, &data, cfg.seed)?;
    Ok(Predictor {
        version: predictor::PREDICTOR_VERSION,
        pipeline,
        model,
        autoenc: if variant.uses_autoenc() { net } else { None },
        bovw,
        detector: cfg.bovw.detector.clone(),
    })
}
