#ifndef ORLICZ_APPROX_H
#define ORLICZ_APPROX_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum OaStatus {
  OA_STATUS_OK = 0,
  OA_STATUS_NULL_POINTER = 1,
  OA_STATUS_INVALID_UTF8 = 2,
  OA_STATUS_CONFIG = 3,
  OA_STATUS_HYPOTHESIS = 4,
  OA_STATUS_NUMERIC = 5,
  OA_STATUS_INVALID_ARGUMENT = 6,
  OA_STATUS_PANIC = 7,
} OaStatus;

// Verdict of a theorem run.
typedef enum OaVerdict {
  OA_VERDICT_BOUNDED = 0,
  OA_VERDICT_GROWING = 1,
  OA_VERDICT_INCONCLUSIVE = 2,
} OaVerdict;

// Opaque trigonometric polynomial.
typedef struct OaFunction OaFunction;

// Opaque ψ pair.
typedef struct OaPsi OaPsi;

// Opaque weighted Orlicz space.
typedef struct OaSpace OaSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty if none. Owned by the
// library and valid until the next failing call on the same thread.
const char *oa_last_error(void);

// Builds `L_{M,ω}` from family strings such as `"power 2"` and `"const"`.
// `grid_points = 0` selects the default grid.
//
// # Safety
// `young` and `weight` must be NUL-terminated strings; `out` must be writable.
enum OaStatus oa_space_new(const char *young,
                           const char *weight,
                           uintptr_t grid_points,
                           struct OaSpace **out);

// # Safety
// `sp` must come from [`oa_space_new`] and not be freed twice. Null is ignored.
void oa_space_free(struct OaSpace *sp);

// Polynomial `a0_half + Σ a[k−1] cos kx + b[k−1] sin kx`, `k = 1..=degree`.
//
// # Safety
// `a` and `b` must point to `degree` doubles each (may be null when `degree = 0`).
enum OaStatus oa_function_new(double a0_half,
                              const double *a,
                              const double *b,
                              uintptr_t degree,
                              struct OaFunction **out);

// Named family such as `"harmonic 3"` or `"poly-decay 2 8"`.
//
// # Safety
// `family` must be a NUL-terminated string; `out` must be writable.
enum OaStatus oa_function_from_family(const char *family, struct OaFunction **out);

// Stored degree of `f`; 0 for a null handle.
//
// # Safety
// `f` must be a live handle or null.
uintptr_t oa_function_degree(const struct OaFunction *f);

// Copies `a0_half` and up to `cap` coefficient pairs out of `f`.
//
// # Safety
// `a` and `b` must have room for `cap` doubles; `a0_half` must be writable.
enum OaStatus oa_function_coeffs(const struct OaFunction *f,
                                 double *a0_half,
                                 double *a,
                                 double *b,
                                 uintptr_t cap);

// # Safety
// `f` must come from this library and not be freed twice. Null is ignored.
void oa_function_free(struct OaFunction *f);

// ψ pair from a family such as `"power 2"` and the shift `beta`.
//
// # Safety
// `family` must be a NUL-terminated string; `out` must be writable.
enum OaStatus oa_psi_new(const char *family, double beta, struct OaPsi **out);

// # Safety
// `psi` must come from [`oa_psi_new`] and not be freed twice. Null is ignored.
void oa_psi_free(struct OaPsi *psi);

// Luxemburg norm of `f`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum OaStatus oa_luxemburg_norm(const struct OaSpace *sp, const struct OaFunction *f, double *out);

// Amemiya (Orlicz) norm of `f`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum OaStatus oa_orlicz_norm(const struct OaSpace *sp, const struct OaFunction *f, double *out);

// `E_n(f)`; `minimizer` may be null, otherwise receives a new handle.
//
// # Safety
// Handles must be live; `value` must be writable.
enum OaStatus oa_best_approx(const struct OaSpace *sp,
                             const struct OaFunction *f,
                             uintptr_t n,
                             double *value,
                             struct OaFunction **minimizer);

// ψ-derivative of `f` as a new handle.
//
// # Safety
// Handles must be live; `out` must be writable.
enum OaStatus oa_psi_derivative(const struct OaFunction *f,
                                const struct OaPsi *psi,
                                struct OaFunction **out);

// ψ-integral of `f` with constant term `a0`, as a new handle.
//
// # Safety
// Handles must be live; `out` must be writable.
enum OaStatus oa_psi_integral(const struct OaFunction *f,
                              const struct OaPsi *psi,
                              double a0,
                              struct OaFunction **out);

// Modulus of smoothness `Ω_r(f; δ)`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum OaStatus oa_modulus(const struct OaSpace *sp,
                         const struct OaFunction *f,
                         uintptr_t r,
                         double delta,
                         double *out);

// `A_p` constant estimate of a weight; `in_ap` is set when it stabilizes.
//
// # Safety
// `weight` must be a NUL-terminated string; outputs must be writable.
enum OaStatus oa_ap_constant(const char *weight,
                             double p,
                             uint64_t seed,
                             double *constant,
                             bool *in_ap);

// Runs the experiment in `config_json`. `report_json` may be null; otherwise
// it receives the JSON report, to be released with [`oa_string_free`].
//
// # Safety
// `config_json` must be a NUL-terminated string; `verdict` must be writable.
enum OaStatus oa_verify(const char *config_json, enum OaVerdict *verdict, char **report_json);

// # Safety
// `s` must come from this library and not be freed twice. Null is ignored.
void oa_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORLICZ_APPROX_H */
