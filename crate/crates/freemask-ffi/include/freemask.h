#pragma once

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from freemask-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a C API call.
 */
typedef enum FmStatus {
  /**
   * Success.
   */
  FM_STATUS_OK = 0,
  /**
   * Mathematically invalid input.
   */
  FM_STATUS_DOMAIN = 1,
  /**
   * Invalid configuration.
   */
  FM_STATUS_CONFIG = 2,
  /**
   * Malformed text input.
   */
  FM_STATUS_PARSE = 3,
  /**
   * Enumeration or summation budget exceeded.
   */
  FM_STATUS_SIZE_LIMIT = 4,
  /**
   * Numerical routine failed.
   */
  FM_STATUS_NUMERICAL = 5,
  /**
   * File system failure.
   */
  FM_STATUS_IO = 6,
  /**
   * A required pointer was null.
   */
  FM_STATUS_NULL_POINTER = 7,
  /**
   * Internal panic caught at the boundary.
   */
  FM_STATUS_PANIC = 8,
} FmStatus;

/**
 * Opaque 0/1 mask handle.
 */
typedef struct FmMask FmMask;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *fm_version(void);

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *fm_last_error_message(void);

/**
 * k-th Catalan number.
 */
enum FmStatus fm_catalan(size_t k, uint64_t *out);

/**
 * Limit moment of an elliptic variable for a star pattern: `stars` has
 * `len` entries, nonzero meaning a starred letter.
 */
enum FmStatus fm_elliptic_star_moment(const uint8_t *stars, size_t len, double rho, double *out);

/**
 * k-th Marchenko-Pastur moment via the non-crossing partition sum.
 */
enum FmStatus fm_mp_moment_nc(size_t k, double y, double *out);

/**
 * k-th Marchenko-Pastur moment via the closed binomial form.
 */
enum FmStatus fm_mp_moment_closed(size_t k, double y, double *out);

/**
 * Density of the Marchenko-Pastur law with aspect ratio y at x
 * (absolutely continuous part only).
 */
enum FmStatus fm_mp_density(double x, double y, double *out);

/**
 * Cumulative distribution of the Marchenko-Pastur law with aspect
 * ratio y at x, including the atom at zero when y > 1.
 */
enum FmStatus fm_mp_cdf(double x, double y, double *out);

/**
 * All-ones mask.
 */
enum FmStatus fm_mask_full(size_t rows, size_t cols, struct FmMask **out);

/**
 * IID Bernoulli(q) mask drawn from the given seed.
 */
enum FmStatus fm_mask_bernoulli(size_t rows,
                                size_t cols,
                                double q,
                                uint64_t seed,
                                struct FmMask **out);

/**
 * Square mask with zeros on the band |i - j| <= width.
 */
enum FmStatus fm_mask_band_removed(size_t n, size_t width, struct FmMask **out);

/**
 * Square mask zeroing the first floor(frac * n) columns.
 */
enum FmStatus fm_mask_kill_columns(size_t n, double frac, struct FmMask **out);

/**
 * Square parity mask keeping entries with i + j even.
 */
enum FmStatus fm_mask_checkerboard(size_t n, struct FmMask **out);

/**
 * Rectangular mask zeroing the top-left alpha x beta block.
 */
enum FmStatus fm_mask_block_zero(size_t rows,
                                 size_t cols,
                                 double alpha,
                                 double beta,
                                 struct FmMask **out);

/**
 * Releases a mask handle. Null is allowed.
 */
void fm_mask_free(struct FmMask *mask);

/**
 * Fraction of ones in the mask.
 */
enum FmStatus fm_mask_density(const struct FmMask *mask, double *out);

/**
 * Density plus the sizes of the epsilon-full row and column sets:
 * rows (columns) missing at most an epsilon fraction of entries.
 */
enum FmStatus fm_mask_epsilon_sets(const struct FmMask *mask,
                                   double epsilon,
                                   double *density,
                                   size_t *row_set_size,
                                   size_t *col_set_size);

/**
 * Normalized mask weight of a pair partition: `pairs` holds k pairs
 * flattened as r1, s1, r2, s2, ... with 1-based indices covering
 * {1, ..., 2k}.
 */
enum FmStatus fm_mask_partition_weight(const struct FmMask *mask,
                                       const size_t *pairs,
                                       size_t k,
                                       double *out);

/**
 * Parses a JSON experiment config, runs it, and returns the JSON report
 * through `out_report_json`. The caller frees the string with
 * `fm_string_free`. A report is returned even when comparisons fail;
 * check its "pass" field.
 */
enum FmStatus fm_run_config_json(const char *config_json, char **out_report_json);

/**
 * Releases a string returned by this library. Null is allowed.
 */
void fm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
