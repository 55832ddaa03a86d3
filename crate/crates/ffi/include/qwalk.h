#ifndef QWALK_H
#define QWALK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every function.
 */
typedef enum QwStatus {
  QW_STATUS_OK = 0,
  QW_STATUS_NULL_POINTER = 1,
  QW_STATUS_INVALID_PARAMETER = 2,
  QW_STATUS_INVALID_FIELD = 3,
  QW_STATUS_TIME_GRID = 4,
  QW_STATUS_SINGULARITY = 5,
  QW_STATUS_DEGENERATE_SYMBOL = 6,
  QW_STATUS_SHAPE = 7,
  QW_STATUS_ANNIHILATOR_INVERSE = 8,
  QW_STATUS_NOT_ADMISSIBLE = 9,
  QW_STATUS_DEGENERATE_INPUT = 10,
  QW_STATUS_BUFFER_TOO_SMALL = 11,
  QW_STATUS_OTHER = 98,
  QW_STATUS_PANIC = 99,
} QwStatus;

/**
 * Opaque spinor field on the ring.
 */
typedef struct QwField QwField;

/**
 * p′, p″, p‴ of the dispersion relation.
 */
typedef struct QwDerivatives {
  double first;
  double second;
  double third;
} QwDerivatives;

/**
 * One measured ratio. Absent values are NaN; an infinite exponent is INFINITY.
 */
typedef struct QwRatioRecord {
  double delta;
  double mass;
  double lambda;
  double t_or_horizon;
  double p;
  double q;
  double ptilde;
  double qtilde;
  double lhs;
  double rhs;
  double ratio;
  bool wrap_ok;
  uint64_t seed;
} QwRatioRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *qw_last_error(void);

/**
 * (1, 0) at lattice index `site` on a ring of `sites` points.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum QwStatus qw_field_new_impulse(double delta,
                                   double mass,
                                   uintptr_t sites,
                                   int64_t site,
                                   struct QwField **out);

/**
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum QwStatus qw_field_new_gaussian(double delta,
                                    double mass,
                                    uintptr_t sites,
                                    double width,
                                    double carrier,
                                    struct QwField **out);

/**
 * Seeded uniform entries on |j| <= radius; a negative radius fills the ring.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum QwStatus qw_field_new_random(double delta,
                                  double mass,
                                  uintptr_t sites,
                                  uint64_t seed,
                                  int64_t radius,
                                  struct QwField **out);

/**
 * Field from `4 * sites` doubles laid out per storage index as
 * (re u₁, im u₁, re u₂, im u₂); storage index i holds site i - sites/2.
 *
 * # Safety
 * `values` must point to `4 * sites` readable doubles and `out` be valid for one pointer write.
 */
enum QwStatus qw_field_from_values(double delta,
                                   double mass,
                                   uintptr_t sites,
                                   const double *values,
                                   struct QwField **out);

/**
 * Releases a handle; NULL is ignored.
 *
 * # Safety
 * `f` must be NULL or a handle from this library not yet freed.
 */
void qw_field_free(struct QwField *f);

/**
 * Number of ring sites, 0 for NULL.
 *
 * # Safety
 * `f` must be NULL or a live handle.
 */
uintptr_t qw_field_sites(const struct QwField *f);

/**
 * Copies the field into `4 * sites` doubles (layout as in `qw_field_from_values`).
 *
 * # Safety
 * `f` must be a live handle and `out` point to `len` writable doubles.
 */
enum QwStatus qw_field_values(const struct QwField *f, double *out, uintptr_t len);

/**
 * U(t)u by stepping; `wrap_ok` (may be NULL) receives the wrap-guard verdict.
 *
 * # Safety
 * `f` must be a live handle, `out` valid for one pointer write, `wrap_ok` NULL or writable.
 */
enum QwStatus qw_evolve(const struct QwField *f, double t, struct QwField **out, bool *wrap_ok);

/**
 * U(t)u through the Fourier symbol; negative t allowed.
 *
 * # Safety
 * `f` must be a live handle and `out` valid for one pointer write.
 */
enum QwStatus qw_spectral_evolve(const struct QwField *f, double t, struct QwField **out);

/**
 * l^p_δ norm; pass INFINITY for the sup norm.
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum QwStatus qw_field_norm(const struct QwField *f, double p, double *out);

/**
 * P_λu.
 *
 * # Safety
 * `f` must be a live handle and `out` valid for one pointer write.
 */
enum QwStatus qw_littlewood_paley(const struct QwField *f, double lambda, struct QwField **out);

/**
 * |D|^a⟨D⟩^b u.
 *
 * # Safety
 * `f` must be a live handle and `out` valid for one pointer write.
 */
enum QwStatus qw_fractional_weight(const struct QwField *f,
                                   double a,
                                   double b,
                                   struct QwField **out);

/**
 * p_δ(ξ).
 *
 * # Safety
 * `out` must be writable.
 */
enum QwStatus qw_dispersion(double xi, double delta, double mass, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum QwStatus qw_dispersion_derivatives(double xi,
                                        double delta,
                                        double mass,
                                        struct QwDerivatives *out);

/**
 * ‖U(t)P_λu‖_∞ / (λ^{1/3}⟨λ⟩t^{-1/3}‖u‖₁).
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum QwStatus qw_dispersive_ratio(const struct QwField *f,
                                  double lambda,
                                  double t,
                                  struct QwRatioRecord *out);

/**
 * Homogeneous Strichartz ratio for a discrete admissible pair over [0, horizon].
 *
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
enum QwStatus qw_homogeneous_ratio(const struct QwField *f,
                                   double p,
                                   double q,
                                   double horizon,
                                   struct QwRatioRecord *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QWALK_H */
