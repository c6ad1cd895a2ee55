#ifndef SQG_H
#define SQG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SqgStatus {
  SQG_STATUS_OK = 0,
  SQG_STATUS_NULL_POINTER = 1,
  SQG_STATUS_INVALID_ARGUMENT = 2,
  SQG_STATUS_CONFIG = 3,
  SQG_STATUS_CFL_VIOLATION = 4,
  SQG_STATUS_BLOWUP = 5,
  SQG_STATUS_IO = 6,
  SQG_STATUS_FORMAT = 7,
  SQG_STATUS_INTERNAL = 8,
} SqgStatus;

typedef enum SqgRegime {
  SQG_REGIME_SUPERCRITICAL = 0,
  SQG_REGIME_CRITICAL = 1,
  SQG_REGIME_SUBCRITICAL_LOW = 2,
  SQG_REGIME_SUBCRITICAL_HIGH = 3,
} SqgRegime;

/**
 * Opaque simulation handle.
 */
typedef struct SqgSimulation SqgSimulation;

/**
 * Norms of the current state.
 */
typedef struct SqgNorms {
  double time;
  double l2;
  /**
   * `L^{p_crit}` norm, NaN when `α ≤ 1/2`.
   */
  double lp_crit;
  double h_alpha;
  double besov_s0;
  /**
   * `∫ 2κ‖Λ^α θ‖² dt` since the handle was created.
   */
  double dissipated;
} SqgNorms;

/**
 * Exponent table; entries that do not apply are NaN.
 */
typedef struct SqgExponents {
  double alpha;
  enum SqgRegime regime;
  double s0;
  double p_crit;
  double lemma_p;
  double lemma_q;
  double gamma;
  double a;
  double m;
} SqgExponents;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * New simulation with default random-spectrum data on an `n × n` grid.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SqgStatus sqg_simulation_new(uint32_t n,
                                  double alpha,
                                  double kappa,
                                  uint64_t seed,
                                  struct SqgSimulation **out);

/**
 * New simulation from `key = value` configuration text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` as in [`sqg_simulation_new`].
 */
enum SqgStatus sqg_simulation_from_config(const char *text, struct SqgSimulation **out);

/**
 * Resumes from a snapshot file, with the `α` and `κ` stored in it.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` as in [`sqg_simulation_new`].
 */
enum SqgStatus sqg_simulation_load(const char *path, struct SqgSimulation **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `sim` must come from a constructor of this library and not be used again.
 */
void sqg_simulation_free(struct SqgSimulation *sim);

/**
 * One integrating-factor RK4 step of size `dt`.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum SqgStatus sqg_simulation_step(struct SqgSimulation *sim, double dt);

/**
 * Advances to time `t` with CFL-limited steps; returns the number of steps
 * taken through `steps` when it is non-null.
 *
 * # Safety
 * `sim` must be a live handle; `steps` null or writable.
 */
enum SqgStatus sqg_simulation_advance(struct SqgSimulation *sim, double t, uint64_t *steps);

/**
 * Grid points per axis.
 *
 * # Safety
 * `sim` must be a live handle or null (then 0 is returned).
 */
uint32_t sqg_simulation_grid_size(const struct SqgSimulation *sim);

/**
 * Current time, NaN for a null handle.
 *
 * # Safety
 * `sim` must be a live handle or null.
 */
double sqg_simulation_time(const struct SqgSimulation *sim);

/**
 * # Safety
 * `sim` must be a live handle; `out` writable.
 */
enum SqgStatus sqg_simulation_norms(const struct SqgSimulation *sim, struct SqgNorms *out);

/**
 * Copies the grid values of `θ`, row-major with `x₁` fastest, into `buf`;
 * `len` must equal `n²`.
 *
 * # Safety
 * `sim` must be a live handle; `buf` must hold `len` doubles.
 */
enum SqgStatus sqg_simulation_physical(const struct SqgSimulation *sim, double *buf, size_t len);

/**
 * Writes the current state as a snapshot file.
 *
 * # Safety
 * `sim` must be a live handle; `path` a NUL-terminated string.
 */
enum SqgStatus sqg_simulation_save(const struct SqgSimulation *sim, const char *path);

/**
 * Exponent table for `alpha`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SqgStatus sqg_exponents(double alpha, struct SqgExponents *out);

/**
 * Copies the last error message of this thread into `buf` (truncated,
 * always NUL-terminated when `len > 0`). Returns the full message length
 * plus one for the terminator.
 *
 * # Safety
 * `buf` must be null or hold `len` bytes.
 */
size_t sqg_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sqg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQG_H */
