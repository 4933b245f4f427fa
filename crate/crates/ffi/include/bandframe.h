#ifndef BANDFRAME_H
#define BANDFRAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum BfStatus {
  BF_STATUS_OK = 0,
  BF_STATUS_NULL_POINTER = 1,
  BF_STATUS_DOMAIN = 2,
  BF_STATUS_UNSUPPORTED = 3,
  BF_STATUS_SHAPE = 4,
  BF_STATUS_ILL_CONDITIONED = 5,
  BF_STATUS_ACCURACY = 6,
  BF_STATUS_MASKED_SAMPLES = 7,
  BF_STATUS_CONSISTENCY = 8,
  BF_STATUS_NOT_RECOVERABLE = 9,
  BF_STATUS_UNDECIDABLE = 10,
  BF_STATUS_BUFFER_TOO_SMALL = 11,
  BF_STATUS_PANIC = 12,
} BfStatus;

/**
 * Frame parameters, generators and duals.
 */
typedef struct BfFrame BfFrame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates the derivative frame of the length implied by `omega` and `t0`.
 * Duals are closed form for length 2 and computed on `grid_points`
 * frequencies per zone otherwise.
 */
enum BfStatus bf_frame_new(double omega, double t0, size_t grid_points, struct BfFrame **out);

/**
 * Releases a frame; null is ignored.
 */
void bf_frame_free(struct BfFrame *f);

/**
 * Number of generators (and of sample channels); 0 for null.
 */
size_t bf_frame_length(const struct BfFrame *f);

/**
 * `h = 2π/t0`; NaN for null.
 */
double bf_frame_h(const struct BfFrame *f);

/**
 * 0 even, 1 odd, 2 even endpoint, 3 odd endpoint; -1 for null.
 */
int32_t bf_frame_regime(const struct BfFrame *f);

/**
 * Grid check of the frame conditions.
 */
enum BfStatus bf_frame_check(const struct BfFrame *f,
                             double grid_density,
                             bool *is_frame,
                             bool *is_riesz);

/**
 * Fourier transforms of the duals at `xi`; `re` and `im` hold `len`
 * values, at least the frame length.
 */
enum BfStatus bf_dual_fourier(const struct BfFrame *f,
                              double xi,
                              double *re,
                              double *im,
                              size_t len);

/**
 * Time-domain duals at `t`.
 */
enum BfStatus bf_dual_time(const struct BfFrame *f, double t, double *out, size_t len);

/**
 * Samples `Σ w_i sinc(omega (x - s_i))` on every channel for
 * `n = n0 .. n0 + count - 1`; `out` holds `length * count` values.
 */
enum BfStatus bf_sample_sinc_sum(const struct BfFrame *f,
                                 const double *weights,
                                 const double *shifts,
                                 size_t terms,
                                 int64_t n0,
                                 size_t count,
                                 double *out);

/**
 * Truncated reconstruction at `nx` points.
 */
enum BfStatus bf_reconstruct(const struct BfFrame *f,
                             const double *samples,
                             int64_t n0,
                             size_t count,
                             const double *xs,
                             size_t nx,
                             double *out);

/**
 * Recovers the samples at `missing` on channels `1..=lambda`, writing them
 * into `samples` in place. `cond` receives the condition number of the
 * system and may be null.
 */
enum BfStatus bf_recover(const struct BfFrame *f,
                         double *samples,
                         int64_t n0,
                         size_t count,
                         const int64_t *missing,
                         size_t n_missing,
                         size_t lambda,
                         double *cond);

/**
 * Copies the last error message of this thread, NUL terminated, into
 * `buf` (truncated to `len - 1` bytes). Returns the full message length.
 */
size_t bf_last_error_message(char *buf, size_t len);

/**
 * Library version, a static NUL-terminated string.
 */
const char *bf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BANDFRAME_H */
