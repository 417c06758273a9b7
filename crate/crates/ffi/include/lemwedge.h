#ifndef LEMWEDGE_H
#define LEMWEDGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; one per error kind of the library plus interface errors.
 */
typedef enum LwStatus {
  LW_STATUS_OK = 0,
  LW_STATUS_NULL_POINTER = 1,
  LW_STATUS_INDEX_OUT_OF_RANGE = 2,
  LW_STATUS_PANIC = 3,
  LW_STATUS_POLE_AT_LATTICE = 10,
  LW_STATUS_NOT_ON_CUBIC = 11,
  LW_STATUS_NO_CONVERGENCE = 12,
  LW_STATUS_DIVISION_NEAR_ZERO = 13,
  LW_STATUS_BRANCH_POINT = 14,
  LW_STATUS_UNIFORMIZATION_POLE = 15,
  LW_STATUS_UNIT_MODULUS_ROOT = 16,
  LW_STATUS_DEGENERATE_EPS = 17,
  LW_STATUS_DOUBLE_ROOT = 18,
  LW_STATUS_ZERO_ORBIT_DERIVATIVE = 19,
  LW_STATUS_SINGULAR_MODE_MATRIX = 20,
  LW_STATUS_SHIFT_SINGULARITY = 21,
  LW_STATUS_EVALUATION_AT_POLE = 22,
  LW_STATUS_INCIDENT_POLE = 23,
  LW_STATUS_NEAR_POLE_DIRECTION = 24,
  LW_STATUS_EXTRAPOLATION_UNSTABLE = 25,
  LW_STATUS_INVALID_CONFIG = 26,
  LW_STATUS_NON_FINITE_OUTPUT = 27,
} LwStatus;

/**
 * Opaque far-field evaluator for one (θ_i, k₀).
 */
typedef struct LwFarField LwFarField;

/**
 * Opaque spectral solution for one (θ_i, ε, k₀).
 */
typedef struct LwSolution LwSolution;

typedef struct LwComplex {
  double re;
  double im;
} LwComplex;

/**
 * Pole point and coefficients of one scattered label.
 */
typedef struct LwResidue {
  uint8_t m;
  int8_t sigma;
  int8_t eps_w;
  struct LwComplex t;
  struct LwComplex y;
  struct LwComplex u;
  struct LwComplex r_i;
  struct LwComplex alpha;
  struct LwComplex beta;
  struct LwComplex c;
  struct LwComplex d;
} LwResidue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the solution; `use_modes` nonzero takes the coefficients from the
 * mode systems instead of the closed-form tables.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
enum LwStatus lw_solution_new(double theta_i,
                              double eps,
                              double k0,
                              int32_t use_modes,
                              struct LwSolution **out);

/**
 * # Safety
 * `sol` must be null or a handle from [`lw_solution_new`] not yet freed.
 */
void lw_solution_free(struct LwSolution *sol);

/**
 * Q_scat at a spectral point ζ.
 *
 * # Safety
 * `sol` must be a live handle and `out` valid for one write.
 */
enum LwStatus lw_q_scat(const struct LwSolution *sol, struct LwComplex zeta, struct LwComplex *out);

/**
 * Q_scat at a torus point u, used as given.
 *
 * # Safety
 * `sol` must be a live handle and `out` valid for one write.
 */
enum LwStatus lw_q_scat_u(const struct LwSolution *sol, struct LwComplex u, struct LwComplex *out);

/**
 * Q_total = 1/(ζ − ζ_i) + Q_scat.
 *
 * # Safety
 * `sol` must be a live handle and `out` valid for one write.
 */
enum LwStatus lw_q_total(const struct LwSolution *sol,
                         struct LwComplex zeta,
                         struct LwComplex *out);

/**
 * Number of scattered labels (15); 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle.
 */
size_t lw_residue_count(const struct LwSolution *sol);

/**
 * Pole data of the `index`-th scattered label in label order.
 *
 * # Safety
 * `sol` must be a live handle and `out` valid for one write.
 */
enum LwStatus lw_residue(const struct LwSolution *sol, size_t index, struct LwResidue *out);

/**
 * R(u₀), the constant removed to fix the gauge.
 *
 * # Safety
 * `sol` must be a live handle and `out` valid for one write.
 */
enum LwStatus lw_gauge_constant(const struct LwSolution *sol, struct LwComplex *out);

/**
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum LwStatus lw_far_field_new(double theta_i, double k0, struct LwFarField **out);

/**
 * # Safety
 * `ff` must be null or a handle from [`lw_far_field_new`] not yet freed.
 */
void lw_far_field_free(struct LwFarField *ff);

/**
 * D(θ, θ_i) and its extrapolation residual.  Returns
 * `LW_STATUS_EXTRAPOLATION_UNSTABLE` when the residual exceeds 10·tol_eval; `out`
 * and `residual` are still written in that case.
 *
 * # Safety
 * `ff` must be a live handle; `out` and `residual` valid for one write
 * (`residual` may be null).
 */
enum LwStatus lw_diffraction_coefficient(const struct LwFarField *ff,
                                         double theta,
                                         struct LwComplex *out,
                                         double *residual);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *lw_status_name(enum LwStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEMWEDGE_H */
