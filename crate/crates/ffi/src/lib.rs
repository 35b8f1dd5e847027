//! C ABI over the harmonia core.
//!
//! Every function returns a [`HarmoniaStatus`]; on failure the message is
//! available from `harmonia_last_error` on the same thread. Handles are
//! opaque and owned by the caller, who releases them with the matching
//! `_free`. Panics never cross the boundary.

use harmonia::features::{extract_handcrafted, handcrafted_layout, HANDCRAFTED_WIDTH};
use harmonia::harness::Predictor;
use harmonia::scene::{self, Composition, GenConfig, Raster};
use harmonia::targets::{merge_classes, ClassLabel};
use harmonia::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmoniaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Computation = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// A composition (shape list plus canvas).
pub struct HarmoniaComposition(Composition);

/// A rasterized composition.
pub struct HarmoniaRaster {
    raster: Raster,
    gray_level: u8,
}

/// A fitted feature pipeline and model.
pub struct HarmoniaPredictor(Predictor);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> HarmoniaStatus {
    match e {
        Error::Io { .. } => HarmoniaStatus::Io,
        Error::Parse { .. } | Error::Csv(_) | Error::Image(_) => HarmoniaStatus::Parse,
        Error::Config(_) | Error::PixelClass { .. } | Error::Dimension(_) => HarmoniaStatus::InvalidArgument,
        _ => HarmoniaStatus::Computation,
    }
}

struct Fail(HarmoniaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HarmoniaStatus::NullArgument, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HarmoniaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HarmoniaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            HarmoniaStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(HarmoniaStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn to_c(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(HarmoniaStatus::Computation, "string contains NUL".into()))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next harmonia call on the same thread.
#[no_mangle]
pub extern "C" fn harmonia_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn harmonia_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn harmonia_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Generates a composition. `config_json` may be null for the default
/// generator settings.
///
/// # Safety
/// `config_json` is null or a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_composition_generate(
    config_json: *const c_char,
    seed: u64,
    out: *mut *mut HarmoniaComposition,
) -> HarmoniaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg: GenConfig = if config_json.is_null() {
            GenConfig::default()
        } else {
            serde_json::from_str(str_arg(config_json, "config_json")?)
                .map_err(|e| Fail(HarmoniaStatus::Parse, format!("generator config: {e}")))?
        };
        *out = Box::into_raw(Box::new(HarmoniaComposition(scene::generate(&cfg, seed)?)));
        Ok(())
    })
}

/// Parses a composition from its JSON form.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_composition_from_json(
    json: *const c_char,
    out: *mut *mut HarmoniaComposition,
) -> HarmoniaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let c: Composition = serde_json::from_str(str_arg(json, "json")?)
            .map_err(|e| Fail(HarmoniaStatus::Parse, format!("composition: {e}")))?;
        c.validate()?;
        *out = Box::into_raw(Box::new(HarmoniaComposition(c)));
        Ok(())
    })
}

/// Serializes a composition; free the result with `harmonia_string_free`.
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_composition_to_json(
    c: *const HarmoniaComposition,
    out: *mut *mut c_char,
) -> HarmoniaStatus {
    guard(|| {
        let c = ref_arg(c, "composition")?;
        let out = out_arg(out, "out")?;
        *out = to_c(serde_json::to_string(&c.0).expect("composition serializes"))?;
        Ok(())
    })
}

/// Composition id; free the result with `harmonia_string_free`.
///
/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_composition_id(
    c: *const HarmoniaComposition,
    out: *mut *mut c_char,
) -> HarmoniaStatus {
    guard(|| {
        let c = ref_arg(c, "composition")?;
        *out_arg(out, "out")? = to_c(c.0.id.clone())?;
        Ok(())
    })
}

/// # Safety
/// `c` is null or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn harmonia_composition_free(c: *mut HarmoniaComposition) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_rasterize(
    c: *const HarmoniaComposition,
    out: *mut *mut HarmoniaRaster,
) -> HarmoniaStatus {
    guard(|| {
        let c = ref_arg(c, "composition")?;
        let out = out_arg(out, "out")?;
        let raster = scene::rasterize(&c.0);
        *out = Box::into_raw(Box::new(HarmoniaRaster { raster, gray_level: c.0.canvas.gray_level }));
        Ok(())
    })
}

/// # Safety
/// `r` is a live handle; `width` and `height` are writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_raster_size(
    r: *const HarmoniaRaster,
    width: *mut u32,
    height: *mut u32,
) -> HarmoniaStatus {
    guard(|| {
        let r = ref_arg(r, "raster")?;
        *out_arg(width, "width")? = r.raster.width();
        *out_arg(height, "height")? = r.raster.height();
        Ok(())
    })
}

/// Copies the raster as 8-bit intensities (row-major: black 0, gray
/// level, white 255) into `buf`, which must hold width × height bytes.
///
/// # Safety
/// `r` is a live handle; `buf` points to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn harmonia_raster_pixels(r: *const HarmoniaRaster, buf: *mut u8, len: usize) -> HarmoniaStatus {
    guard(|| {
        let r = ref_arg(r, "raster")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let img = r.raster.to_gray_image(r.gray_level);
        let bytes = img.as_raw();
        if len < bytes.len() {
            return Err(Fail(HarmoniaStatus::BufferTooSmall, format!("need {} bytes, got {len}", bytes.len())));
        }
        std::slice::from_raw_parts_mut(buf, bytes.len()).copy_from_slice(bytes);
        Ok(())
    })
}

/// # Safety
/// `r` is a live handle; `path` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn harmonia_raster_save_png(r: *const HarmoniaRaster, path: *const c_char) -> HarmoniaStatus {
    guard(|| {
        let r = ref_arg(r, "raster")?;
        scene::save_raster_png(&r.raster, r.gray_level, Path::new(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `r` is null or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn harmonia_raster_free(r: *mut HarmoniaRaster) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of handcrafted feature columns.
#[no_mangle]
pub extern "C" fn harmonia_feature_count() -> usize {
    HANDCRAFTED_WIDTH
}

/// Name of handcrafted column `index`; free with `harmonia_string_free`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_feature_name(index: usize, out: *mut *mut c_char) -> HarmoniaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = handcrafted_layout()
            .names()
            .nth(index)
            .ok_or_else(|| Fail(HarmoniaStatus::InvalidArgument, format!("feature index {index} out of range")))?;
        *out = to_c(name.to_string())?;
        Ok(())
    })
}

/// Extracts the handcrafted features into `values[0..harmonia_feature_count()]`.
///
/// # Safety
/// `c` is a live handle; `values` points to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn harmonia_extract_features(
    c: *const HarmoniaComposition,
    values: *mut f64,
    len: usize,
) -> HarmoniaStatus {
    guard(|| {
        let c = ref_arg(c, "composition")?;
        if values.is_null() {
            return Err(null("values"));
        }
        if len < HANDCRAFTED_WIDTH {
            return Err(Fail(HarmoniaStatus::BufferTooSmall, format!("need {HANDCRAFTED_WIDTH} values, got {len}")));
        }
        let v = extract_handcrafted(&c.0, &scene::rasterize(&c.0))?;
        std::slice::from_raw_parts_mut(values, HANDCRAFTED_WIDTH).copy_from_slice(&v.values);
        Ok(())
    })
}

/// Merged class index (0 bad, 1 neutral, 2 good) of a 1..=5 rating.
///
/// # Safety
/// `label` is writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_merge_rating(rating: u8, label: *mut u8) -> HarmoniaStatus {
    guard(|| {
        *out_arg(label, "label")? = merge_classes(rating)?.index() as u8;
        Ok(())
    })
}

/// Loads a predictor written by `harmonia train`.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn harmonia_predictor_load(path: *const c_char, out: *mut *mut HarmoniaPredictor) -> HarmoniaStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = Predictor::load(Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(HarmoniaPredictor(p)));
        Ok(())
    })
}

/// Predicts a composition. `label` receives the class index (0 bad,
/// 1 neutral, 2 good); `scores[0..3]` receive per-class scores, NaN for
/// classes the model was not trained on. `scores` may be null.
///
/// # Safety
/// Handles are live; `label` is writable; `scores` is null or holds 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn harmonia_predictor_predict(
    p: *const HarmoniaPredictor,
    c: *const HarmoniaComposition,
    label: *mut u8,
    scores: *mut f64,
) -> HarmoniaStatus {
    guard(|| {
        let p = ref_arg(p, "predictor")?;
        let c = ref_arg(c, "composition")?;
        let label = out_arg(label, "label")?;
        let (l, named) = p.0.predict(std::slice::from_ref(&c.0))?.remove(0);
        *label = l.index() as u8;
        if !scores.is_null() {
            let s = std::slice::from_raw_parts_mut(scores, ClassLabel::ALL.len());
            s.fill(f64::NAN);
            for (class, v) in named {
                s[class.index()] = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `p` is null or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn harmonia_predictor_free(p: *mut HarmoniaPredictor) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
