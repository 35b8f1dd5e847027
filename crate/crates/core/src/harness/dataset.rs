//! Loading compositions and turning them into raw feature blocks.

use crate::autoenc::{self, NetworkParams};
use crate::bovw::{detect_describe, BovwModel, DescriptorSet, DetectorConfig};
use crate::error::{Error, Result};
use crate::features::{extract_handcrafted, handcrafted_layout};
use crate::pipeline::Block;
use crate::scene::{load_composition, rasterize, save_composition, Composition};
use crate::targets::{merge_classes, ClassLabel, RatingRecord};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::Path;

/// Every `*.json` composition in `dir`, sorted by id.
pub fn load_corpus(dir: &Path) -> Result<Vec<Composition>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|e| Error::io(dir, e))?.path();
        if p.extension().is_some_and(|x| x == "json") {
            paths.push(p);
        }
    }
    let mut comps = paths.iter().map(|p| load_composition(p)).collect::<Result<Vec<_>>>()?;
    comps.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(comps)
}

pub fn save_corpus(dir: &Path, comps: &[Composition]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for c in comps {
        save_composition(c, &dir.join(format!("{}.json", c.id)))?;
    }
    Ok(())
}

pub fn handcrafted_block(comps: &[Composition]) -> Result<Block> {
    let rows = comps
        .par_iter()
        .map(|c| extract_handcrafted(c, &rasterize(c)).map(|v| v.values))
        .collect::<Result<Vec<_>>>()?;
    Block::from_rows(handcrafted_layout().names().map(String::from).collect(), &rows)
}

pub fn descriptor_sets(comps: &[Composition], cfg: &DetectorConfig) -> Vec<DescriptorSet> {
    comps
        .par_iter()
        .map(|c| detect_describe(&rasterize(c), c.canvas.gray_level, cfg))
        .collect()
}

pub fn bovw_block(model: &BovwModel, sets: &[DescriptorSet]) -> Result<Block> {
    let rows: Vec<Vec<f64>> = sets.par_iter().map(|s| model.encode(s)).collect();
    Block::from_rows(model.column_names(), &rows)
}

/// Downsampled intensity images for autoencoder training.
pub fn autoenc_images(comps: &[Composition], size: usize) -> Vec<Vec<f64>> {
    comps
        .par_iter()
        .map(|c| autoenc::resize(&rasterize(c), c.canvas.gray_level, size))
        .collect()
}

pub fn autoenc_block(params: &NetworkParams, comps: &[Composition]) -> Result<Block> {
    let side = params.spec.input_size;
    let rows: Vec<Vec<f64>> = comps
        .par_iter()
        .map(|c| params.encode(&autoenc::resize(&rasterize(c), c.canvas.gray_level, side)))
        .collect();
    Block::from_rows(autoenc::column_names(&params.spec), &rows)
}

/// Merged label of each id from its initial (round 0) rating; the first
/// matching record wins. `None` for unrated ids.
pub fn labels_from_ratings(records: &[RatingRecord], ids: &[String], rater: Option<&str>) -> Result<Vec<Option<ClassLabel>>> {
    let mut initial: BTreeMap<&str, u8> = BTreeMap::new();
    for r in records.iter().filter(|r| r.round == 0 && rater.is_none_or(|id| r.rater_id == id)) {
        initial.entry(&r.composition_id).or_insert(r.rating);
    }
    ids.iter()
        .map(|id| initial.get(id.as_str()).map(|&r| merge_classes(r)).transpose())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::GenConfig;

    #[test]
    fn corpus_round_trip_and_blocks() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = GenConfig::default();
        let comps: Vec<_> = [3u64, 1, 2].iter().map(|&s| crate::scene::generate(&cfg, s).unwrap()).collect();
        save_corpus(dir.path(), &comps).unwrap();
        let back = load_corpus(dir.path()).unwrap();
        assert_eq!(back.len(), 3);
        assert!(back.windows(2).all(|w| w[0].id < w[1].id));
        let h = handcrafted_block(&back).unwrap();
        assert_eq!(h.data.dim(), (3, 70));
    }

    #[test]
    fn labels_use_initial_round() {
        let t = chrono::DateTime::from_timestamp(0, 0).unwrap();
        let rec = |id: &str, rating, round| RatingRecord { composition_id: id.into(), rating, round, timestamp: t, rater_id: "a".into() };
        let recs = vec![rec("x", 1, 0), rec("x", 5, 1), rec("y", 4, 0)];
        let ids = vec!["x".to_string(), "y".into(), "z".into()];
        assert_eq!(
            labels_from_ratings(&recs, &ids, None).unwrap(),
            vec![Some(ClassLabel::Bad), Some(ClassLabel::Good), None]
        );
    }
}
