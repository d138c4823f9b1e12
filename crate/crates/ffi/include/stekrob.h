#ifndef STEKROB_H
#define STEKROB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum StekrobStatus {
  STEKROB_STATUS_OK = 0,
  /**
   * Assumption check failed (admissibility of the weights).
   */
  STEKROB_STATUS_ASSUMPTION = 2,
  /**
   * Factorization or eigensolver failure.
   */
  STEKROB_STATUS_SOLVER = 3,
  /**
   * Config could not be parsed or validated.
   */
  STEKROB_STATUS_CONFIG = 4,
  /**
   * At least one verification check failed.
   */
  STEKROB_STATUS_VERIFICATION = 5,
  /**
   * Null pointer, bad UTF-8, index out of range or short buffer.
   */
  STEKROB_STATUS_INVALID_ARGUMENT = 6,
  /**
   * Internal panic caught at the boundary.
   */
  STEKROB_STATUS_PANIC = 7,
} StekrobStatus;

/**
 * Parsed problem: config plus mesh and weights.
 */
typedef struct StekrobProblem StekrobProblem;

/**
 * Solved eigenpairs for one problem.
 */
typedef struct StekrobSpectrum StekrobSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the thread.
 */
const char *stekrob_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *stekrob_version(void);

/**
 * Parses a JSON problem config. Relative mesh paths resolve against the
 * working directory.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum StekrobStatus stekrob_problem_from_json(const char *json, struct StekrobProblem **out);

/**
 * # Safety
 * `problem` must come from [`stekrob_problem_from_json`] or be null.
 */
void stekrob_problem_free(struct StekrobProblem *problem);

/**
 * Number of unknowns (`nodes · k`), or 0 for a null handle.
 *
 * # Safety
 * `problem` must be a live handle or null.
 */
uintptr_t stekrob_problem_dofs(const struct StekrobProblem *problem);

/**
 * Components per node, or 0 for a null handle.
 *
 * # Safety
 * `problem` must be a live handle or null.
 */
uintptr_t stekrob_problem_k(const struct StekrobProblem *problem);

/**
 * Assembles (behind the assumption gate) and solves for up to `n_eigs`
 * pairs; `n_eigs = 0` uses the config value.
 *
 * # Safety
 * `problem` must be a live handle; `out` must be writable.
 */
enum StekrobStatus stekrob_solve(const struct StekrobProblem *problem,
                                 uintptr_t n_eigs,
                                 struct StekrobSpectrum **out);

/**
 * # Safety
 * `spectrum` must come from [`stekrob_solve`] or be null.
 */
void stekrob_spectrum_free(struct StekrobSpectrum *spectrum);

/**
 * Number of returned eigenpairs, or 0 for a null handle.
 *
 * # Safety
 * `spectrum` must be a live handle or null.
 */
uintptr_t stekrob_spectrum_len(const struct StekrobSpectrum *spectrum);

/**
 * Number of deflated (weight-null) directions.
 *
 * # Safety
 * `spectrum` must be a live handle or null.
 */
uintptr_t stekrob_spectrum_kernel_dim(const struct StekrobSpectrum *spectrum);

/**
 * Length of each eigenvector.
 *
 * # Safety
 * `spectrum` must be a live handle or null.
 */
uintptr_t stekrob_spectrum_dim(const struct StekrobSpectrum *spectrum);

/**
 * Copies the ascending eigenvalues into `out` (capacity `len`).
 *
 * # Safety
 * `spectrum` must be a live handle; `out` must hold `len` doubles.
 */
enum StekrobStatus stekrob_spectrum_eigenvalues(const struct StekrobSpectrum *spectrum,
                                                double *out,
                                                uintptr_t len);

/**
 * Copies the relative residuals into `out` (capacity `len`).
 *
 * # Safety
 * `spectrum` must be a live handle; `out` must hold `len` doubles.
 */
enum StekrobStatus stekrob_spectrum_residuals(const struct StekrobSpectrum *spectrum,
                                              double *out,
                                              uintptr_t len);

/**
 * Copies eigenvector `index` (0-based, node-major `node·k + component`).
 *
 * # Safety
 * `spectrum` must be a live handle; `out` must hold `len` doubles.
 */
enum StekrobStatus stekrob_spectrum_eigenvector(const struct StekrobSpectrum *spectrum,
                                                uintptr_t index,
                                                double *out,
                                                uintptr_t len);

/**
 * Runs the full verification battery. On `Ok` or `Verification`, `*out_json`
 * receives the report as JSON, to be released with [`stekrob_string_free`].
 *
 * # Safety
 * `problem` must be a live handle; `out_json` must be writable.
 */
enum StekrobStatus stekrob_verify(const struct StekrobProblem *problem, char **out_json);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void stekrob_string_free(char *s);

/**
 * Modified Bessel function `I_n(x)`.
 */
double stekrob_bessel_i(uint32_t n, double x);

/**
 * Exact Steklov eigenvalue of mode `n` on the unit disk (`A = 1`).
 */
double stekrob_disk_steklov_exact(uint32_t n);

/**
 * First `count` Robin eigenvalues of the unit square, with multiplicity.
 *
 * # Safety
 * `out` must hold `count` doubles.
 */
enum StekrobStatus stekrob_robin_square_spectrum(double sigma, uintptr_t count, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEKROB_H */
