#ifndef GLASSYJC_H
#define GLASSYJC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GjcStatus {
  GJC_STATUS_OK = 0,
  GJC_STATUS_VALIDATION = 1,
  GJC_STATUS_CONFIG = 2,
  GJC_STATUS_NUMERICAL = 3,
  GJC_STATUS_IO = 4,
  GJC_STATUS_NULL_POINTER = 5,
  GJC_STATUS_PANIC = 6,
} GjcStatus;

typedef enum GjcKind {
  GJC_KIND_GAUSSIAN = 0,
  GJC_KIND_UNIFORM = 1,
  GJC_KIND_DISCRETE = 2,
  GJC_KIND_CAUCHY = 3,
} GjcKind;

typedef enum GjcEstimator {
  /**
   * Mean for finite-variance kinds, median for Cauchy.
   */
  GJC_ESTIMATOR_AUTO = 0,
  GJC_ESTIMATOR_MEAN = 1,
  GJC_ESTIMATOR_MEDIAN = 2,
} GjcEstimator;

typedef enum GjcFamily {
  GJC_FAMILY_PSI = 0,
  GJC_FAMILY_PHI = 1,
} GjcFamily;

/**
 * Coupled two-atom model parameters.
 */
typedef struct GjcCoupled GjcCoupled;

/**
 * Single-atom model with a fixed photon distribution.
 */
typedef struct GjcSingleJc GjcSingleJc;

/**
 * Disorder law; a strength of zero means clean.
 */
typedef struct GjcDisorder {
  enum GjcKind kind;
  double strength;
} GjcDisorder;

typedef struct GjcPlan {
  uint64_t samples;
  enum GjcEstimator estimator;
  uint64_t seed;
  uint64_t bootstrap_resamples;
} GjcPlan;

typedef struct GjcEstimate {
  double value;
  double spread;
} GjcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gjc_version(void);

/**
 * Copies the calling thread's last error message into `buf` (always
 * NUL-terminated when `len > 0`) and returns the full message length, or 0
 * when there is none.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null.
 */
size_t gjc_last_error_message(char *buf, size_t len);

/**
 * Creates a single-atom model with a Gaussian photon distribution.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GjcStatus gjc_single_new(double nbar, double dn, double g, struct GjcSingleJc **out_handle);

/**
 * # Safety
 * `h` must come from [`gjc_single_new`] and not be used afterwards.
 */
void gjc_single_free(struct GjcSingleJc *h);

/**
 * # Safety
 * Pointers must be valid.
 */
enum GjcStatus gjc_single_revival_period(const struct GjcSingleJc *h, double *out_value);

/**
 * Closed-form quenched inversion; Cauchy disorder yields `Config`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GjcStatus gjc_single_inversion(const struct GjcSingleJc *h,
                                    struct GjcDisorder disorder,
                                    double t,
                                    double *out_value);

/**
 * Sampled quenched inversion.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GjcStatus gjc_single_inversion_quenched(const struct GjcSingleJc *h,
                                             struct GjcDisorder disorder,
                                             struct GjcPlan plan_,
                                             double t,
                                             struct GjcEstimate *out_estimate);

/**
 * Quenched atom-photon entanglement in ebits.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GjcStatus gjc_single_entanglement(const struct GjcSingleJc *h,
                                       struct GjcDisorder disorder,
                                       struct GjcPlan plan_,
                                       double t,
                                       struct GjcEstimate *out_estimate);

/**
 * Concurrence of one double-JC realization with coupling shifts `delta_a`, `delta_b`.
 *
 * # Safety
 * `out_value` must be valid.
 */
enum GjcStatus gjc_double_concurrence(double alpha,
                                      double g_a,
                                      double g_b,
                                      enum GjcFamily fam,
                                      double delta_a,
                                      double delta_b,
                                      double t,
                                      double *out_value);

/**
 * Quenched double-JC concurrence at time `t`.
 *
 * # Safety
 * `out_estimate` must be valid.
 */
enum GjcStatus gjc_double_concurrence_quenched(double alpha,
                                               double g_a,
                                               double g_b,
                                               enum GjcFamily fam,
                                               struct GjcDisorder disorder_a,
                                               struct GjcDisorder disorder_b,
                                               struct GjcPlan plan_,
                                               double t,
                                               struct GjcEstimate *out_estimate);

/**
 * Concurrence of a general two-qubit density matrix given row-major real
 * and imaginary parts (16 entries each).
 *
 * # Safety
 * `re` and `im` must point to 16 doubles each.
 */
enum GjcStatus gjc_concurrence_general(const double *re, const double *im, double *out_value);

/**
 * Creates a coupled model. `interaction` is 0 for Ising (`p1` = Jz, `p2`
 * ignored) or 1 for XY (`p1` = J, `p2` = gamma).
 *
 * # Safety
 * `out_handle` must be valid.
 */
enum GjcStatus gjc_coupled_new(uint32_t interaction,
                               double p1,
                               double p2,
                               double g,
                               double omega,
                               struct GjcCoupled **out_handle);

/**
 * # Safety
 * `h` must come from [`gjc_coupled_new`] and not be used afterwards.
 */
void gjc_coupled_free(struct GjcCoupled *h);

/**
 * Concurrence series of one coupled realization at `n` times.
 *
 * # Safety
 * `times` and `out_values` must hold `n` doubles.
 */
enum GjcStatus gjc_coupled_concurrence(const struct GjcCoupled *h,
                                       double alpha,
                                       double delta_a,
                                       double delta_b,
                                       const double *times,
                                       size_t n,
                                       double *out_values);

/**
 * Counts sudden-death intervals in a sampled concurrence series.
 *
 * # Safety
 * `times` and `values` must hold `n` doubles.
 */
enum GjcStatus gjc_esd_count(const double *times,
                             const double *values,
                             size_t n,
                             double eps,
                             double min_gap,
                             size_t *out_count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLASSYJC_H */
