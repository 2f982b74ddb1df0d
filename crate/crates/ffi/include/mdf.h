#ifndef MDF_H
#define MDF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum MdfStatus {
  MDF_STATUS_OK = 0,
  MDF_STATUS_NULL_POINTER = 1,
  MDF_STATUS_INVALID_INPUT = 2,
  MDF_STATUS_DIM_MISMATCH = 3,
  MDF_STATUS_NOT_A_STATE = 4,
  MDF_STATUS_NOT_FAITHFUL = 5,
  MDF_STATUS_NOT_J_REAL = 6,
  MDF_STATUS_NO_CONVERGENCE = 7,
  MDF_STATUS_OVERFLOW = 8,
  MDF_STATUS_QUADRATURE_NOT_CONVERGED = 9,
  MDF_STATUS_NOT_ADMISSIBLE = 10,
  MDF_STATUS_BALANCE_VIOLATED = 11,
  MDF_STATUS_NOT_SELF_ADJOINT = 12,
  MDF_STATUS_ENGINE_DISAGREEMENT = 13,
  MDF_STATUS_DIMENSION_TOO_LARGE = 14,
  MDF_STATUS_BUFFER_TOO_SMALL = 15,
  MDF_STATUS_PANIC = 16,
} MdfStatus;

typedef enum MdfKernel {
  MDF_KERNEL_F0 = 0,
  /*
   Uses the `scale` argument.
   */
  MDF_KERNEL_CAUCHY = 1,
} MdfKernel;

typedef enum MdfEngine {
  MDF_ENGINE_EXACT_SPECTRAL = 0,
  MDF_ENGINE_QUADRATURE = 1,
} MdfEngine;

/*
 Opaque handle to a faithful state and its standard form.
 */
typedef struct MdfStandardForm MdfStandardForm;

/*
 Opaque handle to a superoperator.
 */
typedef struct MdfSuperOperator MdfSuperOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Builds the standard form of the density matrix `rho` (`n x n`).

 # Safety
 `rho` must point to `2 n^2` doubles and `out` must be writable.
 */
enum MdfStatus mdf_standard_form_new(size_t n, const double *rho, struct MdfStandardForm **out);

/*
 Standard form of the normalized trace `I / n`.

 # Safety
 `out` must be writable.
 */
enum MdfStatus mdf_standard_form_tracial(size_t n, struct MdfStandardForm **out);

/*
 Dimension `n` of the algebra, or 0 for a null handle.

 # Safety
 `sf` must be null or a live handle.
 */
size_t mdf_standard_form_dim(const struct MdfStandardForm *sf);

/*
 # Safety
 `sf` must be null or a handle not yet freed.
 */
void mdf_standard_form_free(struct MdfStandardForm *sf);

/*
 Dirichlet operator `H` of the coefficient `x` and kernel.

 `scale` is read only for [`MdfKernel::Cauchy`].

 # Safety
 `sf` must be live, `x` must point to `2 n^2` doubles and `out` must be writable.
 */
enum MdfStatus mdf_dirichlet_operator(const struct MdfStandardForm *sf,
                                      const double *x,
                                      enum MdfKernel kernel,
                                      double scale,
                                      enum MdfEngine engine,
                                      struct MdfSuperOperator **out);

/*
 Operator `H = i0 L i0^{-1}` induced by the Lindblad generator with jump
 operators `ys` (`count` matrices stored back to back).

 A null `q` selects the canonical drift built from the coefficients
 `x_k = sigma_{i/4}(y_k)`.

 # Safety
 `ys` must point to `count * 2 n^2` doubles, `q` must be null or point to
 `2 n^2` doubles, and `out` must be writable.
 */
enum MdfStatus mdf_induced_operator(const struct MdfStandardForm *sf,
                                    const double *ys,
                                    size_t count,
                                    const double *q,
                                    struct MdfSuperOperator **out);

/*
 Algebra dimension `n` the operator acts on (its matrix is `n^2 x n^2`),
 or 0 for a null handle.

 # Safety
 `op` must be null or a live handle.
 */
size_t mdf_superop_dim(const struct MdfSuperOperator *op);

/*
 Copies the eigenbasis matrix into `out`, which holds `len` doubles
 (at least `2 n^4`).

 # Safety
 `op` must be live and `out` must point to `len` writable doubles.
 */
enum MdfStatus mdf_superop_copy_matrix(const struct MdfSuperOperator *op, double *out, size_t len);

/*
 Applies `op` to the matrix `x` given in the input basis; writes `2 n^2`
 doubles to `out`.

 # Safety
 Handles must be live, `x` and `out` must each hold `2 n^2` doubles.
 */
enum MdfStatus mdf_superop_apply(const struct MdfStandardForm *sf,
                                 const struct MdfSuperOperator *op,
                                 const double *x,
                                 double *out);

/*
 Smallest positive eigenvalue (NaN when the operator is zero) and the
 kernel dimension of a self-adjoint operator.

 # Safety
 `op` must be live; `gap` and `kernel_dim` must be writable.
 */
enum MdfStatus mdf_spectral_gap(const struct MdfSuperOperator *op, double *gap, size_t *kernel_dim);

/*
 # Safety
 `op` must be null or a handle not yet freed.
 */
void mdf_superop_free(struct MdfSuperOperator *op);

/*
 Runs every suite of a scenario given as JSON text.

 A negative `seed` keeps the scenario's own seed. On success `report_out`
 receives the JSON report (free it with [`mdf_string_free`]) and `passed`
 whether every suite passed.

 # Safety
 `json` must be a NUL-terminated string; `report_out` and `passed` must be writable.
 */
enum MdfStatus mdf_run_scenario_json(const char *json,
                                     int64_t seed,
                                     char **report_out,
                                     bool *passed);

/*
 # Safety
 `s` must be null or a string returned by this library and not yet freed.
 */
void mdf_string_free(char *s);

/*
 Message of the last failed call on this thread, or null. The pointer
 stays valid until the next call into the library from the same thread.
 */
const char *mdf_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *mdf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MDF_H */
