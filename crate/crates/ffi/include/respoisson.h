#ifndef RESPOISSON_H
#define RESPOISSON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_NULL_POINTER = 1,
  RP_STATUS_INVALID_INPUT = 2,
  // `t` is below the smallest time at which the resonance tail is bounded.
  RP_STATUS_TAIL_BOUND = 3,
  // Quadrature, root finding or mode summation did not reach tolerance.
  RP_STATUS_NUMERICAL = 4,
  RP_STATUS_OUT_OF_RANGE = 5,
  RP_STATUS_PANIC = 6,
} RpStatus;

typedef enum RpBoundary {
  RP_BOUNDARY_DIRICHLET = 0,
  RP_BOUNDARY_NEUMANN = 1,
} RpBoundary;

typedef enum RpRegionKind {
  // Conic neighbourhood of the real axis on the identified plane.
  RP_REGION_KIND_CONE = 0,
  // The whole upper half-plane; odd dimensions only.
  RP_REGION_KIND_UPPER_HALF_PLANE = 1,
} RpRegionKind;

typedef struct RpDensity RpDensity;

typedef struct RpModel RpModel;

typedef struct RpResonanceSet RpResonanceSet;

// A trace value with its error bound.
typedef struct RpTrace {
  double value;
  double error;
  // Set with `RP_STATUS_TAIL_BOUND`: the smallest usable `t`.
  double t_min;
} RpTrace;

// One resonance, in polar form on the logarithmic plane and projected.
typedef struct RpResonance {
  double r;
  double theta;
  double re;
  double im;
  uint32_t multiplicity;
  uint32_t mode;
  uint64_t weight;
} RpResonance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *rp_last_error(void);

// Library version as a static NUL-terminated string.
const char *rp_version(void);

// `boundary` is an `RpBoundary` value.
//
// # Safety
// `out_model` must be a valid pointer.
enum RpStatus rp_model_new(uint32_t dimension,
                           double radius,
                           uint32_t boundary,
                           struct RpModel **out_model);

// # Safety
// `model` must come from `rp_model_new` and not have been freed.
void rp_model_free(struct RpModel *model);

// `sigma'(lambda)` for real `lambda > 0`.
//
// # Safety
// Pointers must be valid.
enum RpStatus rp_model_sigma_prime(const struct RpModel *model,
                                   double lambda,
                                   double tol,
                                   double *out_value);

// `s'/s` summed over modes at `r e^{i theta}`.
//
// # Safety
// Pointers must be valid.
enum RpStatus rp_model_log_derivative(const struct RpModel *model,
                                      double r,
                                      double theta,
                                      double tol,
                                      double *out_re,
                                      double *out_im);

// Heat trace at time `t > 0`.
//
// # Safety
// Pointers must be valid.
enum RpStatus rp_heat_trace(const struct RpModel *model, double t, struct RpTrace *out_trace);

// Resonances of `model` with `r_min <= |lambda| <= r_max`. `kind` is an
// `RpRegionKind` value and `rho` is read for cones only. Modes above
// `per_mode_cap` are not searched.
//
// # Safety
// Pointers must be valid.
enum RpStatus rp_find_resonances(const struct RpModel *model,
                                 uint32_t kind,
                                 double rho,
                                 double r_min,
                                 double r_max,
                                 uint32_t per_mode_cap,
                                 struct RpResonanceSet **out_set);

// # Safety
// `set` must come from `rp_find_resonances` and not have been freed.
void rp_resonance_set_free(struct RpResonanceSet *set);

// Number of distinct resonances; 0 for a null handle.
//
// # Safety
// `set` must be null or valid.
size_t rp_resonance_set_len(const struct RpResonanceSet *set);

// # Safety
// Pointers must be valid.
enum RpStatus rp_resonance_set_get(const struct RpResonanceSet *set,
                                   size_t index,
                                   struct RpResonance *out_resonance);

// Largest distance from a resonance to the mirror image of its nearest partner.
//
// # Safety
// Pointers must be valid.
enum RpStatus rp_resonance_set_symmetry_defect(const struct RpResonanceSet *set, double *out_value);

// `k`-th derivative of the resonance sum at `t`, with the truncation tail bound.
//
// # Safety
// Pointers must be valid.
enum RpStatus rp_resonance_trace(const struct RpResonanceSet *set,
                                 double t,
                                 uint32_t k,
                                 struct RpTrace *out_trace);

// Spectral density of `model` prepared for wave-trace moments.
//
// # Safety
// Pointers must be valid.
enum RpStatus rp_density_new(const struct RpModel *model, struct RpDensity **out_density);

// # Safety
// `density` must come from `rp_density_new` and not have been freed.
void rp_density_free(struct RpDensity *density);

// `k`-th derivative of the wave trace at `t` from the scattering phase.
//
// # Safety
// Pointers must be valid.
enum RpStatus rp_wave_trace(const struct RpDensity *density,
                            double t,
                            uint32_t k,
                            struct RpTrace *out_trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESPOISSON_H */
