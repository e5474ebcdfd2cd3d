#ifndef GMM_EXPANSION_H
#define GMM_EXPANSION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GmxStatus {
  GMX_STATUS_OK = 0,
  GMX_STATUS_INVALID_PARAMETER = 1,
  GMX_STATUS_INVALID_INPUT = 2,
  GMX_STATUS_DEGENERATE_RANGE = 3,
  GMX_STATUS_NO_MASS = 4,
  GMX_STATUS_NUMERICAL_UNDERFLOW = 5,
  GMX_STATUS_PARSE = 6,
  GMX_STATUS_IO = 7,
  GMX_STATUS_JSON = 8,
  GMX_STATUS_NULL_POINTER = 9,
  GMX_STATUS_BUFFER_TOO_SMALL = 10,
  GMX_STATUS_UNSUPPORTED = 11,
  GMX_STATUS_PANIC = 12,
} GmxStatus;

// Opaque model handle.
typedef struct GmxModel GmxModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *gmx_last_error(void);

// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GmxStatus gmx_model_from_json(const char *json, struct GmxModel **out);

// The returned string must be released with [`gmx_string_free`].
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum GmxStatus gmx_model_to_json(const struct GmxModel *model, char **out);

// # Safety
// `s` must come from this library, or be null.
void gmx_string_free(char *s);

// # Safety
// `model` must come from this library, or be null.
void gmx_model_free(struct GmxModel *model);

// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum GmxStatus gmx_model_dim(const struct GmxModel *model, size_t *out);

// Component weights. Call with a null `buf` to learn the length.
//
// # Safety
// `buf` must hold `cap` doubles; `model` and `out_len` must be valid.
enum GmxStatus gmx_model_weights(const struct GmxModel *model,
                                 double *buf,
                                 size_t cap,
                                 size_t *out_len);

// Density at a point of `dim` coordinates.
//
// # Safety
// `x` must hold `dim` doubles; `model` and `out` must be valid.
enum GmxStatus gmx_model_pdf(const struct GmxModel *model,
                             const double *x,
                             size_t dim,
                             double *out);

// Probability of the interval `(a, b]` under a one-dimensional model.
//
// # Safety
// `model` and `out` must be valid.
enum GmxStatus gmx_interval_prob(const struct GmxModel *model, double a, double b, double *out);

// Draws `n` points (row-major, `n * dim` values) into `buf`.
//
// # Safety
// `buf` must hold `cap` doubles; `model` and `out_len` must be valid.
enum GmxStatus gmx_model_sample(const struct GmxModel *model,
                                size_t n,
                                uint64_t seed,
                                double *buf,
                                size_t cap,
                                size_t *out_len);

// Uniform-weight grid scaffold over the range of one-dimensional data.
//
// # Safety
// `data` must hold `len` doubles and `out` must be valid.
enum GmxStatus gmx_grid_build(const double *data,
                              size_t len,
                              size_t units,
                              double t,
                              struct GmxModel **out);

// Single-pass weight fit on a grid scaffold. Nonzero `exact` keeps the
// prior term in the update.
//
// # Safety
// `scaffold` must be a live grid handle, `data` must hold `len` doubles
// (`len / dim` points), and `out` must be valid.
enum GmxStatus gmx_fit_one_iteration(const struct GmxModel *scaffold,
                                     const double *data,
                                     size_t len,
                                     int exact,
                                     struct GmxModel **out);

// Streaming fit on a one-dimensional grid scaffold. A non-positive or NaN
// `d` selects the default window.
//
// # Safety
// As for [`gmx_fit_one_iteration`].
enum GmxStatus gmx_fit_incremental(const struct GmxModel *scaffold,
                                   const double *data,
                                   size_t len,
                                   double d,
                                   struct GmxModel **out);

// EM with `k` free components started from an even grid. `tol = 0` runs
// exactly `iters` iterations.
//
// # Safety
// `data` must hold `len` doubles and `out` must be valid.
enum GmxStatus gmx_em_fit(const double *data,
                          size_t len,
                          size_t k,
                          size_t iters,
                          double tol,
                          struct GmxModel **out);

// Integrated probability error between two one-dimensional models over
// `bins` equal bins spanning both supports.
//
// # Safety
// `f`, `g` and `out` must be valid.
enum GmxStatus gmx_ipe(const struct GmxModel *f,
                       const struct GmxModel *g,
                       size_t bins,
                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GMM_EXPANSION_H */
