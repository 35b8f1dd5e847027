#ifndef HARMONIA_H
#define HARMONIA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HarmoniaStatus {
  HARMONIA_STATUS_OK = 0,
  HARMONIA_STATUS_NULL_ARGUMENT = 1,
  HARMONIA_STATUS_INVALID_ARGUMENT = 2,
  HARMONIA_STATUS_IO = 3,
  HARMONIA_STATUS_PARSE = 4,
  HARMONIA_STATUS_COMPUTATION = 5,
  HARMONIA_STATUS_BUFFER_TOO_SMALL = 6,
  HARMONIA_STATUS_PANIC = 7,
} HarmoniaStatus;

// A composition (shape list plus canvas).
typedef struct HarmoniaComposition HarmoniaComposition;

// A fitted feature pipeline and model.
typedef struct HarmoniaPredictor HarmoniaPredictor;

// A rasterized composition.
typedef struct HarmoniaRaster HarmoniaRaster;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next harmonia call on the same thread.
const char *harmonia_last_error(void);

// Library version as a static string.
const char *harmonia_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void harmonia_string_free(char *s);

// Generates a composition. `config_json` may be null for the default
// generator settings.
//
// # Safety
// `config_json` is null or a NUL-terminated string; `out` is writable.
enum HarmoniaStatus harmonia_composition_generate(const char *config_json,
                                                  uint64_t seed,
                                                  struct HarmoniaComposition **out);

// Parses a composition from its JSON form.
//
// # Safety
// `json` is a NUL-terminated string; `out` is writable.
enum HarmoniaStatus harmonia_composition_from_json(const char *json,
                                                   struct HarmoniaComposition **out);

// Serializes a composition; free the result with `harmonia_string_free`.
//
// # Safety
// `c` is a live handle; `out` is writable.
enum HarmoniaStatus harmonia_composition_to_json(const struct HarmoniaComposition *c, char **out);

// Composition id; free the result with `harmonia_string_free`.
//
// # Safety
// `c` is a live handle; `out` is writable.
enum HarmoniaStatus harmonia_composition_id(const struct HarmoniaComposition *c, char **out);

// # Safety
// `c` is null or a handle that has not been freed.
void harmonia_composition_free(struct HarmoniaComposition *c);

// # Safety
// `c` is a live handle; `out` is writable.
enum HarmoniaStatus harmonia_rasterize(const struct HarmoniaComposition *c,
                                       struct HarmoniaRaster **out);

// # Safety
// `r` is a live handle; `width` and `height` are writable.
enum HarmoniaStatus harmonia_raster_size(const struct HarmoniaRaster *r,
                                         uint32_t *width,
                                         uint32_t *height);

// Copies the raster as 8-bit intensities (row-major: black 0, gray
// level, white 255) into `buf`, which must hold width × height bytes.
//
// # Safety
// `r` is a live handle; `buf` points to `len` writable bytes.
enum HarmoniaStatus harmonia_raster_pixels(const struct HarmoniaRaster *r,
                                           uint8_t *buf,
                                           uintptr_t len);

// # Safety
// `r` is a live handle; `path` is a NUL-terminated string.
enum HarmoniaStatus harmonia_raster_save_png(const struct HarmoniaRaster *r, const char *path);

// # Safety
// `r` is null or a handle that has not been freed.
void harmonia_raster_free(struct HarmoniaRaster *r);

// Number of handcrafted feature columns.
uintptr_t harmonia_feature_count(void);

// Name of handcrafted column `index`; free with `harmonia_string_free`.
//
// # Safety
// `out` is writable.
enum HarmoniaStatus harmonia_feature_name(uintptr_t index, char **out);

// Extracts the handcrafted features into `values[0..harmonia_feature_count()]`.
//
// # Safety
// `c` is a live handle; `values` points to `len` writable doubles.
enum HarmoniaStatus harmonia_extract_features(const struct HarmoniaComposition *c,
                                              double *values,
                                              uintptr_t len);

// Merged class index (0 bad, 1 neutral, 2 good) of a 1..=5 rating.
//
// # Safety
// `label` is writable.
enum HarmoniaStatus harmonia_merge_rating(uint8_t rating, uint8_t *label);

// Loads a predictor written by `harmonia train`.
//
// # Safety
// `path` is a NUL-terminated string; `out` is writable.
enum HarmoniaStatus harmonia_predictor_load(const char *path, struct HarmoniaPredictor **out);

// Predicts a composition. `label` receives the class index (0 bad,
// 1 neutral, 2 good); `scores[0..3]` receive per-class scores, NaN for
// classes the model was not trained on. `scores` may be null.
//
// # Safety
// Handles are live; `label` is writable; `scores` is null or holds 3 doubles.
enum HarmoniaStatus harmonia_predictor_predict(const struct HarmoniaPredictor *p,
                                               const struct HarmoniaComposition *c,
                                               uint8_t *label,
                                               double *scores);

// # Safety
// `p` is null or a handle that has not been freed.
void harmonia_predictor_free(struct HarmoniaPredictor *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARMONIA_H */
