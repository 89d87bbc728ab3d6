#ifndef CRITVAL_H
#define CRITVAL_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CritvalStatus {
  CRITVAL_STATUS_OK = 0,
  CRITVAL_STATUS_INVALID_PARAMETER = 1,
  CRITVAL_STATUS_CONSTRAINT_VIOLATION = 2,
  CRITVAL_STATUS_NUMERICAL_FAILURE = 3,
  CRITVAL_STATUS_UNSUPPORTED = 4,
  CRITVAL_STATUS_NULL_POINTER = 5,
  CRITVAL_STATUS_PANIC = 6,
} CritvalStatus;

/**
 * Opaque density on a uniform grid.
 */
typedef struct CritvalMeasure CritvalMeasure;

typedef struct CritvalConstants {
  double s;
  double d;
  double h;
} CritvalConstants;

typedef struct CritvalOmega {
  double omega_bar;
  double omega;
  double s_omega;
} CritvalOmega;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *critval_last_error(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum CritvalStatus critval_spectral_constants(int64_t m, struct CritvalConstants *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum CritvalStatus critval_omega_params(int64_t m, double l, double r, struct CritvalOmega *out);

/**
 * `ln Z_m` of the Selberg-type normalization.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CritvalStatus critval_ln_selberg_z(uint32_t m, double *out);

/**
 * Exact one-point function `rho_{n,v}(x)` for `n <= 4`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CritvalStatus critval_rho_exact(size_t n, double v, double x, double *out);

/**
 * `E|det(A - c)|` for `A` in the GOE of size `m <= 3` with variance `v`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CritvalStatus critval_expected_abs_det(size_t m, double v, double c, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum CritvalStatus critval_semicircle_density(double v, double x, double *out);

/**
 * The limit measure `sigma_{m,r}` (`m <= 3`, exact one-point function) on
 * `n` points of `[lo, hi]`.
 *
 * # Safety
 * `out` must be valid for writes. The handle must be released with
 * [`critval_measure_free`].
 */
enum CritvalStatus critval_sigma_mr(size_t m,
                                    double r,
                                    double lo,
                                    double hi,
                                    size_t n,
                                    struct CritvalMeasure **out);

/**
 * # Safety
 * `measure` must come from this library and not be used afterwards. NULL is ignored.
 */
void critval_measure_free(struct CritvalMeasure *measure);

/**
 * # Safety
 * `measure` must be a live handle.
 */
size_t critval_measure_len(const struct CritvalMeasure *measure);

/**
 * Copies `min(len, grid size)` density values into `buf` and writes the grid
 * bounds and total mass.
 *
 * # Safety
 * `measure` must be a live handle; `buf` valid for `len` writes; the other
 * out pointers valid for writes.
 */
enum CritvalStatus critval_measure_read(const struct CritvalMeasure *measure,
                                        double *buf,
                                        size_t len,
                                        double *lo,
                                        double *hi,
                                        double *mass);

/**
 * Kolmogorov-Smirnov distance between two measures.
 *
 * # Safety
 * Both handles live; `out` valid for writes.
 */
enum CritvalStatus critval_ks_distance(const struct CritvalMeasure *a,
                                       const struct CritvalMeasure *b,
                                       double *out);

/**
 * Kac-Rice expected number of critical points of the torus field.
 *
 * # Safety
 * `value` and `std_error` valid for writes.
 */
enum CritvalStatus critval_kac_rice_total(size_t m,
                                          double l,
                                          double omega,
                                          size_t samples,
                                          uint64_t seed,
                                          double *value,
                                          double *std_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRITVAL_H */
