/* C interface of the bmv trace-measure library. */

#ifndef BMV_H
#define BMV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
enum BmvStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  // success
  BMV_STATUS_OK = 0,
  // a required pointer was NULL or a size was zero
  BMV_STATUS_NULL_ARGUMENT = -1,
  // input failed validation (not Hermitian, bad dimension, bad parameter)
  BMV_STATUS_INVALID_INPUT = -2,
  // a numerical stage failed (radius search, tracking, convergence)
  BMV_STATUS_NUMERICAL_FAILURE = -3,
  // an output buffer was too small
  BMV_STATUS_BUFFER_TOO_SMALL = -4,
  // an internal panic was caught; this is a bug
  BMV_STATUS_INTERNAL = -5,
};
#ifndef __cplusplus
typedef int32_t BmvStatus;
#endif // __cplusplus

// Opaque measure handle.
typedef struct BmvMeasure BmvMeasure;

// Flat verification summary (full detail lives in the Rust/CLI report).
typedef struct BmvReport {
  double max_rel_error;
  double residual_max;
  double min_density;
  double max_density;
  double shift;
  double radius;
  uintptr_t n_nodes;
  // 1 when every check passed
  uint8_t all_pass;
  uint8_t positivity_pass;
  uint8_t laplace_pass;
  uint8_t residual_pass;
} BmvReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Compute the representing measure of Tr exp(A - tB).
//
// `eps_split <= 0` selects the default splitting scale. On success writes a
// handle to `out`; free it with `bmv_measure_free`.
//
// # Safety
// `a_re`, `b_re` must point to n*n doubles; `a_im`, `b_im` to n*n doubles or
// be NULL; `out` must be a valid pointer.
BmvStatus bmv_measure_compute(uintptr_t n,
                              const double *a_re,
                              const double *a_im,
                              const double *b_re,
                              const double *b_im,
                              double eps_split,
                              struct BmvMeasure **out);

// # Safety
// `handle` must come from `bmv_measure_compute` and not have been freed.
void bmv_measure_free(struct BmvMeasure *handle);

// Number of atoms (always the dimension n).
//
// # Safety
// `handle` must be a live handle.
uintptr_t bmv_measure_atom_count(const struct BmvMeasure *handle);

// Number of density samples ((n-1) * points_per_interval).
//
// # Safety
// `handle` must be a live handle.
uintptr_t bmv_measure_density_count(const struct BmvMeasure *handle);

// Spectrum shift applied during reduction (atom locations are in reduced
// coordinates; subtract the shift for original-B coordinates).
//
// # Safety
// `handle` must be a live handle.
double bmv_measure_shift(const struct BmvMeasure *handle);

// Contour radius the measure was computed on.
//
// # Safety
// `handle` must be a live handle.
double bmv_measure_radius(const struct BmvMeasure *handle);

// Node count at convergence.
//
// # Safety
// `handle` must be a live handle.
uintptr_t bmv_measure_nodes(const struct BmvMeasure *handle);

// Copy atom locations and weights into caller buffers of capacity `cap`.
//
// # Safety
// `locations` and `weights` must each point to at least `cap` doubles.
BmvStatus bmv_measure_atoms(const struct BmvMeasure *handle,
                            double *locations,
                            double *weights,
                            uintptr_t cap);

// Copy density sample locations and values into caller buffers.
//
// # Safety
// `s` and `w` must each point to at least `cap` doubles.
BmvStatus bmv_measure_density(const struct BmvMeasure *handle, double *s, double *w, uintptr_t cap);

// Run the full verification (Laplace round-trip, positivity, contour
// residual) with default configuration and fill `report`.
//
// # Safety
// Matrix pointers as in `bmv_measure_compute`; `report` must be valid.
BmvStatus bmv_verify(uintptr_t n,
                     const double *a_re,
                     const double *a_im,
                     const double *b_re,
                     const double *b_im,
                     struct BmvReport *report);

// f(t) = Tr exp(A - tB), written to `out`.
//
// # Safety
// Matrix pointers as in `bmv_measure_compute`; `out` must be valid.
BmvStatus bmv_trace_exp(uintptr_t n,
                        const double *a_re,
                        const double *a_im,
                        const double *b_re,
                        const double *b_im,
                        double t,
                        double *out);

// Coefficients c_0..c_p of t -> Tr (A + tB)^p for positive semi-definite B.
// `coeffs` must hold p + 1 doubles.
//
// # Safety
// Matrix pointers as in `bmv_measure_compute`; `coeffs` must point to at
// least p + 1 doubles.
BmvStatus bmv_poly_coeffs(uintptr_t n,
                          const double *a_re,
                          const double *a_im,
                          const double *b_re,
                          const double *b_im,
                          uintptr_t p,
                          double *coeffs);

// Static name for a status code.
const char *bmv_status_name(int32_t code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BMV_H */
