use harmonia_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    let p = harmonia_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn generated(seed: u64) -> *mut HarmoniaComposition {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { harmonia_composition_generate(ptr::null(), seed, &mut c) }, HarmoniaStatus::Ok);
    assert!(!c.is_null());
    c
}

#[test]
fn generate_rasterize_extract() {
    let c = generated(11);
    unsafe {
        let mut id = ptr::null_mut();
        assert_eq!(harmonia_composition_id(c, &mut id), HarmoniaStatus::Ok);
        assert_eq!(CStr::from_ptr(id).to_str().unwrap(), "000000000000000b");
        harmonia_string_free(id);

        let mut r = ptr::null_mut();
        assert_eq!(harmonia_rasterize(c, &mut r), HarmoniaStatus::Ok);
        let (mut w, mut h) = (0, 0);
        assert_eq!(harmonia_raster_size(r, &mut w, &mut h), HarmoniaStatus::Ok);
        assert_eq!((w, h), (512, 512));
        let mut px = vec![7u8; (w * h) as usize];
        assert_eq!(harmonia_raster_pixels(r, px.as_mut_ptr(), px.len()), HarmoniaStatus::Ok);
        assert!(px.iter().all(|&v| v == 0 || v == 128 || v == 255));
        assert_eq!(harmonia_raster_pixels(r, px.as_mut_ptr(), 10), HarmoniaStatus::BufferTooSmall);
        harmonia_raster_free(r);

        let n = harmonia_feature_count();
        assert_eq!(n, 70);
        let mut v = vec![f64::NAN; n];
        assert_eq!(harmonia_extract_features(c, v.as_mut_ptr(), n), HarmoniaStatus::Ok);
        assert!(v.iter().all(|x| x.is_finite()));
        let mut name = ptr::null_mut();
        assert_eq!(harmonia_feature_name(0, &mut name), HarmoniaStatus::Ok);
        assert_eq!(CStr::from_ptr(name).to_str().unwrap(), "n_shapes");
        harmonia_string_free(name);
        let c0 = harmonia::scene::generate(&Default::default(), 11).unwrap();
        let want = harmonia::features::extract_handcrafted(&c0, &harmonia::scene::rasterize(&c0)).unwrap();
        assert_eq!(v, want.values);
        assert_eq!(harmonia_feature_name(n, &mut name), HarmoniaStatus::InvalidArgument);
        harmonia_composition_free(c);
    }
}

#[test]
fn json_round_trip() {
    let c = generated(3);
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(harmonia_composition_to_json(c, &mut json), HarmoniaStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(harmonia_composition_from_json(json, &mut back), HarmoniaStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(harmonia_composition_to_json(back, &mut again), HarmoniaStatus::Ok);
        assert_eq!(CStr::from_ptr(json), CStr::from_ptr(again));
        harmonia_string_free(json);
        harmonia_string_free(again);
        harmonia_composition_free(back);
        harmonia_composition_free(c);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut c = ptr::null_mut();
        let bad = CString::new("{not json").unwrap();
        assert_eq!(harmonia_composition_from_json(bad.as_ptr(), &mut c), HarmoniaStatus::Parse);
        assert!(c.is_null());
        assert!(last_error().contains("composition"));

        assert_eq!(harmonia_composition_from_json(ptr::null(), &mut c), HarmoniaStatus::NullArgument);
        assert_eq!(last_error(), "json is null");

        let mut p = ptr::null_mut();
        let missing = CString::new("/nonexistent/model.json").unwrap();
        assert_eq!(harmonia_predictor_load(missing.as_ptr(), &mut p), HarmoniaStatus::Io);

        let mut label = 9;
        assert_eq!(harmonia_merge_rating(7, &mut label), HarmoniaStatus::InvalidArgument);
        assert_eq!(label, 9);
        for (rating, want) in [(1, 0), (2, 1), (3, 1), (4, 2), (5, 2)] {
            assert_eq!(harmonia_merge_rating(rating, &mut label), HarmoniaStatus::Ok);
            assert_eq!(label, want);
        }
        assert!(harmonia_last_error().is_null());

        // freeing null is a no-op
        harmonia_composition_free(ptr::null_mut());
        harmonia_raster_free(ptr::null_mut());
        harmonia_predictor_free(ptr::null_mut());
        harmonia_string_free(ptr::null_mut());
    }
}

#[test]
fn predictor_round_trip() {
    use harmonia::harness::{fit_predictor, ExperimentConfig};
    use harmonia::learn::Family;
    use harmonia::pipeline::DatasetVariant;
    use harmonia::scene::{generate, GenConfig};
    use harmonia::targets::ClassLabel;

    let comps: Vec<_> = (0..40).map(|s| generate(&GenConfig::default(), s).unwrap()).collect();
    let labels: Vec<_> = (0..40).map(|i| if i % 2 == 0 { ClassLabel::Bad } else { ClassLabel::Good }).collect();
    let cfg = ExperimentConfig::default();
    let pred = fit_predictor(&comps, &labels, DatasetVariant::D3, Family::Tree, &cfg, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    pred.save(&path).unwrap();
    let expected = pred.predict(&comps[..1]).unwrap().remove(0);

    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let c = generated(0);
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(harmonia_predictor_load(cpath.as_ptr(), &mut p), HarmoniaStatus::Ok);
        let mut label = 9;
        let mut scores = [0.0; 3];
        assert_eq!(harmonia_predictor_predict(p, c, &mut label, scores.as_mut_ptr()), HarmoniaStatus::Ok);
        assert_eq!(label as usize, expected.0.index());
        assert!(scores[ClassLabel::Neutral.index()].is_nan());
        for (class, s) in expected.1 {
            assert_eq!(scores[class.index()], s);
        }
        harmonia_predictor_free(p);
        harmonia_composition_free(c);
    }
}

/// Compiles a small C program against the generated header and static
/// library. Skipped when no C compiler is available.
#[test]
fn header_compiles_and_links() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if std::process::Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "harmonia.h"
int main(void) {
    HarmoniaComposition *c = NULL;
    if (harmonia_composition_generate(NULL, 5, &c) != HARMONIA_STATUS_OK) return 1;
    double v[70];
    if (harmonia_extract_features(c, v, harmonia_feature_count()) != HARMONIA_STATUS_OK) return 2;
    uint8_t label;
    if (harmonia_merge_rating(0, &label) != HARMONIA_STATUS_INVALID_ARGUMENT) return 3;
    if (harmonia_last_error() == NULL) return 4;
    harmonia_composition_free(c);
    printf("%g\n", v[0]);
    return 0;
}
"#,
    )
    .unwrap();
    // the static library sits next to the deps directory of this test binary
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().parent().unwrap().join("libharmonia_ffi.a");
    let bin = dir.path().join("main");
    let mut cmd = std::process::Command::new(&cc);
    cmd.arg("-std=c99").arg("-Wall").arg("-Werror").arg("-I").arg(include).arg(&src);
    if lib.exists() {
        cmd.arg(&lib).args(["-lpthread", "-ldl", "-lm", "-o"]).arg(&bin);
    } else {
        cmd.args(["-fsyntax-only"]);
    }
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    if lib.exists() {
        let run = std::process::Command::new(&bin).output().unwrap();
        assert!(run.status.success(), "exit {:?}", run.status.code());
        let c0 = harmonia::scene::generate(&Default::default(), 5).unwrap();
        let want = harmonia::features::extract_handcrafted(&c0, &harmonia::scene::rasterize(&c0)).unwrap();
        assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), want.values[0].to_string());
    }
}
