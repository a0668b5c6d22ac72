#ifndef ROBBINS_H
#define ROBBINS_H

/* Generated by cbindgen from robbins-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum RbStatus {
  RB_STATUS_OK = 0,
  RB_STATUS_INVALID_INPUT = 1,
  RB_STATUS_NO_CONVERGENCE = 2,
  RB_STATUS_NULL_POINTER = 3,
  RB_STATUS_PANIC = 4,
} RbStatus;

/**
 * Opaque stopping policy handle.
 */
typedef struct RbPolicy RbPolicy;

/**
 * Monte Carlo estimate of a policy's expected rank.
 */
typedef struct RbSimResult {
  double mean;
  double std_error;
  uint64_t trials;
  uint64_t seed;
} RbSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a policy from a registry id such as "exact4" or "memoryless:10".
 *
 * # Safety
 * `id` must be a valid NUL-terminated string and `out` a valid pointer.
 * The returned handle must be released with [`rb_policy_free`].
 */
enum RbStatus rb_policy_new(const char *id, struct RbPolicy **out);

/**
 * Releases a handle from [`rb_policy_new`]. NULL is a no-op.
 *
 * # Safety
 * `policy` must be NULL or a handle not yet freed.
 */
void rb_policy_free(struct RbPolicy *policy);

/**
 * Number of observations the policy plays over.
 *
 * # Safety
 * `policy` must be a live handle; `out` must be a valid pointer.
 */
enum RbStatus rb_policy_horizon(const struct RbPolicy *policy, uintptr_t *out);

/**
 * Acceptance threshold at `step` (1-based) given the `history_len`
 * already-rejected values in `history`.
 *
 * # Safety
 * `policy` must be a live handle; `history` must point to `history_len`
 * doubles (may be NULL when `history_len` is 0); `out` must be valid.
 */
enum RbStatus rb_policy_threshold(const struct RbPolicy *policy,
                                  uintptr_t step,
                                  const double *history,
                                  uintptr_t history_len,
                                  double *out);

/**
 * Deterministic Monte Carlo estimate of the policy's expected rank.
 *
 * # Safety
 * `policy` must be a live handle; `out` must be a valid pointer.
 */
enum RbStatus rb_simulate(const struct RbPolicy *policy,
                          uint64_t trials,
                          uint64_t seed,
                          struct RbSimResult *out);

/**
 * Expected rank of a memoryless threshold vector (`thresholds[n-1]`
 * must be 1, entries nondecreasing in (0, 1]).
 *
 * # Safety
 * `thresholds` must point to `n` doubles; `out` must be valid.
 */
enum RbStatus rb_expected_rank(const double *thresholds, uintptr_t n, double *out);

/**
 * Optimal memoryless thresholds and value for horizon `n`; writes the
 * thresholds into the caller's length-`n` buffer.
 *
 * # Safety
 * `thresholds_out` must point to `n` writable doubles; `value_out` must
 * be valid.
 */
enum RbStatus rb_optimize(uintptr_t n, double tol, double *thresholds_out, double *value_out);

/**
 * Optimal value v(n) from the backward-induction oracle (n in 2..=5).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RbStatus rb_value_v(uintptr_t n, double *out);

/**
 * No-information benchmark W(n).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RbStatus rb_w_value(uintptr_t n, double *out);

/**
 * Step-2 threshold h2(x1) of the exact horizon-4 policy.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RbStatus rb_h2(double x1, double *out);

/**
 * Step-3 threshold h3(x1, x2) of the exact horizon-4 policy.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RbStatus rb_h3(double x1, double x2, double *out);

/**
 * Minimizer-region label for the step-3 threshold; writes a pointer to
 * a static NUL-terminated string ("A1".."B3").
 *
 * # Safety
 * `out` must be a valid pointer. The returned string must not be freed.
 */
enum RbStatus rb_classify_region(double x1, double x2, const char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ROBBINS_H */
