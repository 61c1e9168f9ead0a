#ifndef PMC_H
#define PMC_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PmcStatus {
  PMC_STATUS_OK = 0,
  PMC_STATUS_NULL_POINTER = 1,
  PMC_STATUS_INVALID_INPUT = 2,
  PMC_STATUS_OUTSIDE_REGIME = 3,
  PMC_STATUS_UNDEFINED_OUTCOME = 4,
  PMC_STATUS_NUMERICAL = 5,
  PMC_STATUS_PARSE = 6,
  PMC_STATUS_INTERNAL = 7,
} PmcStatus;

/**
 * Opaque finite joint distribution.
 */
typedef struct PmcJoint PmcJoint;

/**
 * Aggregate leakage levels of a joint, in nats.
 */
typedef struct PmcLevels {
  double pml;
  double pmc;
  double lip;
  double alip_lower;
  double alip_upper;
  double ldp;
  double max_cost_leakage;
  double max_realizable_cost;
} PmcLevels;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *pmc_last_error(void);

/**
 * Builds a joint from a prior of length `n_x` and a row-major channel of
 * `n_x * n_y` entries.
 *
 * # Safety
 * `prior` and `channel` must point to the stated number of doubles.
 */
enum PmcStatus pmc_joint_new(const double *prior,
                             size_t n_x,
                             const double *channel,
                             size_t n_y,
                             struct PmcJoint **out);

/**
 * Builds a joint from a finite mechanism document (explicit channel,
 * randomized response or extremal family).
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum PmcStatus pmc_joint_from_json(const char *json, struct PmcJoint **out);

/**
 * # Safety
 * `handle` must come from a constructor in this library and not be freed
 * twice. Null is ignored.
 */
void pmc_joint_free(struct PmcJoint *handle);

/**
 * # Safety
 * `handle` must be a live joint.
 */
enum PmcStatus pmc_joint_outputs(const struct PmcJoint *handle, size_t *out);

/**
 * Pointwise maximal cost of outcome `y`.
 *
 * # Safety
 * `handle` must be a live joint.
 */
enum PmcStatus pmc_joint_pmc(const struct PmcJoint *handle, size_t y, double *out);

/**
 * Pointwise maximal leakage of outcome `y`.
 *
 * # Safety
 * `handle` must be a live joint.
 */
enum PmcStatus pmc_joint_pml(const struct PmcJoint *handle, size_t y, double *out);

/**
 * # Safety
 * `handle` must be a live joint.
 */
enum PmcStatus pmc_joint_levels(const struct PmcJoint *handle, struct PmcLevels *out);

/**
 * # Safety
 * Out pointers must be null or valid for writes.
 */
enum PmcStatus pmc_pml_to_pmc(double eps_u, double p_min, double *out);

/**
 * # Safety
 * Out pointers must be null or valid for writes.
 */
enum PmcStatus pmc_pmc_to_pml(double eps_l, double p_min, double *out);

/**
 * # Safety
 * Out pointers must be null or valid for writes.
 */
enum PmcStatus pmc_ldp_to_pmc(double eps, double p_min, double *out);

/**
 * Randomized response on `n` symbols with parameter `eps`, under `prior`.
 *
 * # Safety
 * `prior` must point to `n` doubles.
 */
enum PmcStatus pmc_randomized_response(const double *prior,
                                       size_t n,
                                       double eps,
                                       struct PmcJoint **out);

/**
 * PML-optimal mechanism for `prior` at level `eps_u`.
 *
 * # Safety
 * `prior` must point to `n` doubles.
 */
enum PmcStatus pmc_extremal_mechanism(const double *prior,
                                      size_t n,
                                      double eps_u,
                                      struct PmcJoint **out);

/**
 * Supremum of the PMC of a Laplace-noised mean of `n` samples uniform on
 * `[lo, hi]` with noise scale `b`.
 *
 * # Safety
 * Out pointers must be null or valid for writes.
 */
enum PmcStatus pmc_laplace_sup_pmc(double lo, double hi, size_t n, double b, double *out);

/**
 * PMC at `y` of `X + N(0, sigma^2)` with `X` uniform on `[-amplitude, amplitude]`.
 *
 * # Safety
 * Out pointers must be null or valid for writes.
 */
enum PmcStatus pmc_gaussian_pmc(double amplitude, double sigma, double y, double *out);

/**
 * Closed-form lower and upper bounds on the Gaussian PMC at `y`.
 *
 * # Safety
 * Out pointers must be null or valid for writes.
 */
enum PmcStatus pmc_gaussian_pmc_bounds(double amplitude,
                                       double sigma,
                                       double y,
                                       double *lower,
                                       double *upper);

/**
 * Level report of a finite mechanism document, as a JSON string owned by
 * the caller and released with [`pmc_string_free`].
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum PmcStatus pmc_analyze_json(const char *json, char **out);

/**
 * # Safety
 * `s` must come from this library. Null is ignored.
 */
void pmc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PMC_H */
