#ifndef EXPSUM_H
#define EXPSUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum ExpsumStatus {
  EXPSUM_STATUS_OK = 0,
  EXPSUM_STATUS_NULL_POINTER = 1,
  EXPSUM_STATUS_INVALID_ARGUMENT = 2,
  EXPSUM_STATUS_ILL_CONDITIONED = 3,
  EXPSUM_STATUS_MALFORMED_SIGNAL = 4,
  EXPSUM_STATUS_INTERNAL = 5,
  EXPSUM_STATUS_PANIC = 6,
} ExpsumStatus;

/*
 Opaque result of `expsum_minimize`.
 */
typedef struct ExpsumFit ExpsumFit;

/*
 Opaque target function.
 */
typedef struct ExpsumSignal ExpsumSignal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer
 stays valid until the next `expsum_*` call on the same thread.
 */
const char *expsum_last_error_message(void);

/*
 New handle for `sign(x)`. Never NULL.
 */
struct ExpsumSignal *expsum_signal_sign(void);

/*
 New handle for samples `f(x_k) = re[k] + i·im[k]` on a uniform odd grid
 from -π to π.
 */
enum ExpsumStatus expsum_signal_sampled(const double *x,
                                        const double *re,
                                        const double *im,
                                        size_t len,
                                        struct ExpsumSignal **out);

/*
 Releases a signal handle. NULL is ignored.
 */
void expsum_signal_free(struct ExpsumSignal *signal);

/*
 Squared norm `‖f‖²` with the 1/(2π) normalization.
 */
enum ExpsumStatus expsum_signal_norm_sq(const struct ExpsumSignal *signal, double *out);

/*
 Minimal squared deflection for the `n` frequencies `re[k] + i·im[k]`.
 Frequencies closer than `cluster_tol` are merged into expo-polynomials.
 */
enum ExpsumStatus expsum_phi(const struct ExpsumSignal *signal,
                             const double *lambda_re,
                             const double *lambda_im,
                             size_t n,
                             double cluster_tol,
                             double *out);

/*
 Closed-form one-frequency objective of `sign(x)` at `u + iv`.
 */
double expsum_phi_sign_one_freq(double u, double v);

/*
 Closed-form objective of `sign(x)` on the double cluster at `iv`.
 */
double expsum_phi_sign_cluster_axis(double v);

/*
 Root of `πv·sin(πv) + cos(πv) = 1` in (0.1, 0.9).
 */
enum ExpsumStatus expsum_solve_v0(double *out);

/*
 Multi-start search for `n` frequencies with default box and tolerances.
 */
enum ExpsumStatus expsum_minimize(const struct ExpsumSignal *signal,
                                  size_t n,
                                  size_t starts,
                                  uint64_t seed,
                                  struct ExpsumFit **out);

/*
 Best objective value; NaN for a NULL handle.
 */
double expsum_fit_phi(const struct ExpsumFit *fit);

size_t expsum_fit_evaluations(const struct ExpsumFit *fit);

/*
 Number of frequencies (equals the number of basis terms).
 */
size_t expsum_fit_len(const struct ExpsumFit *fit);

/*
 Frequency `index` as found by the search.
 */
enum ExpsumStatus expsum_fit_frequency(const struct ExpsumFit *fit,
                                       size_t index,
                                       double *re,
                                       double *im);

/*
 Basis term `index`: `coef · x^degree · e^{λx}`.
 */
enum ExpsumStatus expsum_fit_term(const struct ExpsumFit *fit,
                                  size_t index,
                                  uint32_t *degree,
                                  double *lambda_re,
                                  double *lambda_im,
                                  double *coef_re,
                                  double *coef_im);

/*
 Releases a fit handle. NULL is ignored.
 */
void expsum_fit_free(struct ExpsumFit *fit);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXPSUM_H */
