#ifndef MULTIPATH_H
#define MULTIPATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MP_SCOPE_QFI 1

#define MP_SCOPE_TWOWELL 2

#define MP_SCOPE_NONLINEAR 4

#define MP_SCOPE_G2 8

#define MP_HBAR_NATURAL 0

#define MP_HBAR_SI 1

/**
 * Status codes. `MP_STATUS_OK` is zero.
 */
typedef enum MpStatus {
  MP_STATUS_OK = 0,
  MP_STATUS_INVALID_ARGUMENT = 1,
  MP_STATUS_BASIS_TOO_LARGE = 2,
  MP_STATUS_DEGENERATE_POTENTIAL = 3,
  MP_STATUS_UNDEFINED_SQUEEZING = 4,
  MP_STATUS_EIGEN_NO_CONVERGENCE = 5,
  MP_STATUS_TRUNCATION_SHIFT = 6,
  MP_STATUS_NEGATIVE_DENSITY = 7,
  MP_STATUS_QUADRATURE_NO_CONVERGENCE = 8,
  MP_STATUS_NO_FRINGE_SIGNAL = 9,
  MP_STATUS_DARK_FRINGE = 10,
  MP_STATUS_NULL_POINTER = 11,
  MP_STATUS_PANIC = 12,
} MpStatus;

/**
 * Opaque fixed-particle-number Fock state.
 */
typedef struct MpFockState MpFockState;

/**
 * Opaque site-factorized product state.
 */
typedef struct MpProduct MpProduct;

/**
 * Quadrature settings; start from [`mp_grid_default`].
 */
typedef struct MpGrid {
  size_t nodes_1d;
  size_t nodes_2d;
  double tolerance;
} MpGrid;

/**
 * Site-resolved moments of a product state.
 */
typedef struct MpSiteMoments {
  /**
   * `⟨â⟩`
   */
  double a1;
  /**
   * `⟨â²⟩`
   */
  double a2;
  /**
   * `⟨n̂⟩`
   */
  double n1;
  /**
   * `⟨n̂²⟩`
   */
  double n2;
  double var_n;
} MpSiteMoments;

/**
 * Fit-estimator pieces for a product state.
 */
typedef struct MpFit {
  double f1;
  double c;
  double i1;
  double i2;
  /**
   * `(F₁ + C)/(m F₁²)`.
   */
  double variance_theta;
  /**
   * Non-zero when `F₁ + C < 0`, i.e. the estimate is not physical.
   */
  int32_t invalid;
} MpFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (always
 * NUL-terminated when `len > 0`) and returns the full message length in
 * bytes, excluding the terminator. Pass `len = 0` to query the length.
 */
size_t mp_last_error_message(char *buf, size_t len);

/**
 * Static, NUL-terminated library version.
 */
const char *mp_version(void);

enum MpStatus mp_ultimate_bound(uint64_t particles,
                                size_t sites,
                                double exponent,
                                uint32_t repetitions,
                                double *out);

enum MpStatus mp_symmetric_bound_linear(size_t sites,
                                        double entanglement,
                                        uint32_t repetitions,
                                        double *out);

enum MpStatus mp_symmetric_bound_nonlinear(size_t sites,
                                           double exponent,
                                           double entanglement,
                                           uint32_t repetitions,
                                           double *out);

enum MpStatus mp_approx_bound_nonlinear(size_t sites,
                                        double exponent,
                                        double entanglement,
                                        uint32_t repetitions,
                                        double *out);

/**
 * `Δ²g` from `Δ²θ` for a potential `g·x^j`; `hbar` is one of the
 * `MP_HBAR_*` constants.
 */
enum MpStatus mp_theta_to_g(double variance_theta,
                            double exponent,
                            double spacing,
                            double duration,
                            uint32_t hbar,
                            double *out);

struct MpGrid mp_grid_default(void);

/**
 * Gaussian occupation profile with mean `mean_n` and width `sigma` on
 * each of `sites` sites.
 */
enum MpStatus mp_product_gaussian(size_t sites,
                                  double mean_n,
                                  double sigma,
                                  struct MpProduct **out);

/**
 * Product state from real on-site amplitudes `c_0 … c_{len−1}`
 * (normalized on input).
 */
enum MpStatus mp_product_from_amplitudes(size_t sites,
                                         const double *amplitudes,
                                         size_t len,
                                         struct MpProduct **out);

void mp_product_free(struct MpProduct *state);

enum MpStatus mp_product_moments(const struct MpProduct *state, struct MpSiteMoments *out);

/**
 * Phase squeezing `ξ²` of the product state.
 */
enum MpStatus mp_product_squeezing(const struct MpProduct *state, double *out);

/**
 * Fit-estimator sensitivity from the far-field fringe of a product state.
 */
enum MpStatus mp_fit_sensitivity(const struct MpProduct *state,
                                 const struct MpGrid *grid,
                                 uint32_t repetitions,
                                 struct MpFit *out);

enum MpStatus mp_state_superfluid(uint32_t particles, size_t sites, struct MpFockState **out);

/**
 * Site-symmetric NOON state: all particles on one site, superposed over
 * the choice of site.
 */
enum MpStatus mp_state_noon(uint32_t particles, size_t sites, struct MpFockState **out);

/**
 * Ground state of the two-site Bose-Hubbard model `−E_J·Jx + U·Jz²`.
 */
enum MpStatus mp_state_bose_hubbard(uint32_t particles,
                                    double josephson,
                                    double interaction,
                                    struct MpFockState **out);

void mp_state_free(struct MpFockState *state);

/**
 * Quantum Fisher information `4Var(ĥ_j)` of a pure state.
 */
enum MpStatus mp_state_qfi(const struct MpFockState *state, double exponent, double *out);

/**
 * Runs the oracle suites selected by `scopes` (a bit mask of
 * `MP_SCOPE_*`, zero for all) and writes 1 to `passed` if every check held.
 */
enum MpStatus mp_verify(uint32_t scopes, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULTIPATH_H */
