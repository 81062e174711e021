#ifndef RING_CRYSTAL_H
#define RING_CRYSTAL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call.
 */
typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  /**
   * An argument is outside the function's domain.
   */
  RC_STATUS_DOMAIN = 2,
  /**
   * A complete integral diverges (`k = 1`).
   */
  RC_STATUS_DIVERGENT = 3,
  /**
   * An iteration hit its cap without converging.
   */
  RC_STATUS_NO_CONVERGENCE = 4,
  /**
   * A precondition between arguments was violated.
   */
  RC_STATUS_CONTRACT = 5,
  /**
   * The numerics blew up (divergence, instability, lost normalization).
   */
  RC_STATUS_NUMERICAL = 6,
  RC_STATUS_NO_BRACKET = 7,
  RC_STATUS_IO = 8,
  RC_STATUS_INVALID_UTF8 = 9,
  /**
   * A caller buffer is too small; nothing was written.
   */
  RC_STATUS_BUFFER_TOO_SMALL = 10,
  RC_STATUS_PANIC = 11,
} RcStatus;

/**
 * Opaque ground state.
 */
typedef struct RcStationaryState RcStationaryState;

/**
 * Opaque flux-sweep table.
 */
typedef struct RcSweepTable RcSweepTable;

/**
 * Closed-form half-flux state at one coupling.
 */
typedef struct RcHalfFlux {
  double lambda;
  double k;
  double big_k;
  double big_e;
  double mu;
  double eps;
} RcHalfFlux;

/**
 * Solver settings; mirrors the library's `SolverConfig`.
 */
typedef struct RcSolverConfig {
  size_t n_points;
  double dtau;
  double dt;
  size_t max_iters;
  double residual_tol;
  double energy_tol;
  double split_tol;
  uint64_t seed;
  double noise_amplitude;
} RcSolverConfig;

/**
 * Scalar summary of a stationary state.
 */
typedef struct RcStateSummary {
  double eps;
  double mu;
  double residual;
  size_t iterations;
  size_t n_points;
  bool converged;
} RcStateSummary;

/**
 * One table row. Absent optional values are NaN.
 */
typedef struct RcSweepRecord {
  double lambda;
  double alpha;
  double eps_numeric;
  double eps_uniform_best;
  double eps_wilczek;
  double eps_analytic_half_flux;
  double delta_eps;
  double delta_eps_asymptotic;
  double residual;
  bool converged;
  size_t n_points;
} RcSweepRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` as a
 * NUL-terminated string, truncating to `len - 1` bytes. Returns the full
 * message length (without the terminator); an empty message means the last
 * call succeeded.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t rc_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rc_version(void);

/**
 * Complete elliptic integral of the first kind, modulus `k` in `[0, 1)`.
 *
 * # Safety
 * `out` must be null or point to a writable `double`.
 */
enum RcStatus rc_elliptic_k(double k, double *out);

/**
 * Complete elliptic integral of the second kind, modulus `k` in `[0, 1]`.
 *
 * # Safety
 * `out` must be null or point to a writable `double`.
 */
enum RcStatus rc_elliptic_e(double k, double *out);

/**
 * Jacobi `cn`, `sn`, `dn` at argument `u` and modulus `k`.
 *
 * # Safety
 * Each output must be null or point to a writable `double`.
 */
enum RcStatus rc_jacobi(double u, double k, double *cn, double *sn, double *dn);

/**
 * Solves the half-flux modulus equation for `lambda > 0`.
 *
 * # Safety
 * `out` must be null or point to a writable `RcHalfFlux`.
 */
enum RcStatus rc_half_flux(double lambda, struct RcHalfFlux *out);

/**
 * The strong-coupling law `−3[1 − cos 2πα] λ² e^{−πλ}`.
 */
double rc_asymptotic_delta_energy(double lambda, double alpha);

/**
 * Fills `out` with the default solver settings.
 *
 * # Safety
 * `out` must be null or point to a writable `RcSolverConfig`.
 */
enum RcStatus rc_solver_config_default(struct RcSolverConfig *out);

/**
 * Runs the imaginary-time ground-state search. A null `config` means the
 * defaults. On success `*out` owns a new handle; release it with
 * [`rc_stationary_state_free`].
 *
 * # Safety
 * `config` must be null or point to a valid `RcSolverConfig`; `out` must
 * point to a writable handle pointer.
 */
enum RcStatus rc_ground_state(double lambda,
                              double alpha,
                              const struct RcSolverConfig *config,
                              struct RcStationaryState **out);

/**
 * # Safety
 * `state` must be a live handle; `out` must be null or writable.
 */
enum RcStatus rc_stationary_state_summary(const struct RcStationaryState *state,
                                          struct RcStateSummary *out);

/**
 * Copies `|ψ_j|²` into `buf`, which must hold `n_points` values.
 *
 * # Safety
 * `state` must be a live handle; `buf` must point to `len` writable doubles.
 */
enum RcStatus rc_stationary_state_density(const struct RcStationaryState *state,
                                          double *buf,
                                          size_t len);

/**
 * Releases a state handle. Null is ignored.
 *
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void rc_stationary_state_free(struct RcStationaryState *state);

/**
 * Ground states at `lambda` for `n_alphas` fluxes within `[−1, 3/2]`,
 * on up to `jobs` threads (`0` = all cores).
 *
 * # Safety
 * `alphas` must point to `n_alphas` doubles; `config` must be null or
 * valid; `out` must point to a writable handle pointer.
 */
enum RcStatus rc_flux_sweep(double lambda,
                            const double *alphas,
                            size_t n_alphas,
                            const struct RcSolverConfig *config,
                            size_t jobs,
                            struct RcSweepTable **out);

/**
 * Number of rows; zero for a null handle.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t rc_sweep_table_len(const struct RcSweepTable *table);

/**
 * # Safety
 * `table` must be a live handle; `out` must be null or writable.
 */
enum RcStatus rc_sweep_table_record(const struct RcSweepTable *table,
                                    size_t index,
                                    struct RcSweepRecord *out);

/**
 * Writes the table as CSV to the UTF-8 path `path`.
 *
 * # Safety
 * `table` must be a live handle; `path` must be a NUL-terminated string.
 */
enum RcStatus rc_sweep_table_write_csv(const struct RcSweepTable *table, const char *path);

/**
 * Releases a table handle. Null is ignored.
 *
 * # Safety
 * `table` must be null or a handle not yet freed.
 */
void rc_sweep_table_free(struct RcSweepTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RING_CRYSTAL_H */
