/* C ABI for the percolation quantum walk simulator. */

#ifndef PQW_H
#define PQW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum PqwStatus {
  PQW_STATUS_OK = 0,
  PQW_STATUS_NULL_POINTER = 1,
  PQW_STATUS_INVALID_UTF8 = 2,
  /**
   * The configuration failed to parse or validate.
   */
  PQW_STATUS_INVALID_CONFIG = 3,
  /**
   * Pattern enumeration exceeded the configured cap.
   */
  PQW_STATUS_RESOURCE_CAP_EXCEEDED = 4,
  /**
   * The simulated signal vanished (all amplitudes attenuated away).
   */
  PQW_STATUS_SIGNAL_EXTINCTION = 5,
  /**
   * The caller's buffer is smaller than the data.
   */
  PQW_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * The requested data is absent for the configured mode.
   */
  PQW_STATUS_NOT_AVAILABLE = 7,
  PQW_STATUS_RUN_FAILED = 8,
} PqwStatus;

/**
 * Opaque experiment handle. Create with [`pqw_experiment_run`], release
 * with [`pqw_experiment_free`].
 */
typedef struct PqwExperiment PqwExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Runs the experiment described by a JSON configuration (the same schema
 * the CLI takes; the output section is ignored — nothing is written).
 *
 * On success writes a handle to `out` and returns `Ok`. On failure leaves
 * `out` untouched; consult [`pqw_last_error_message`].
 *
 * # Safety
 * `config_json` must be a valid NUL-terminated string and `out` a valid
 * pointer to pointer storage.
 */
enum PqwStatus pqw_experiment_run(const char *config_json, struct PqwExperiment **out);

/**
 * Releases an experiment handle. A null handle is a no-op.
 *
 * # Safety
 * `handle` must have come from [`pqw_experiment_run`] and not been freed.
 */
void pqw_experiment_free(struct PqwExperiment *handle);

/**
 * Number of evolution steps n; every per-step buffer holds n + 1 entries
 * (step 0 is the initial state).
 *
 * # Safety
 * `handle` must be a live experiment handle.
 */
uintptr_t pqw_experiment_steps(const struct PqwExperiment *handle);

/**
 * Number of graph vertices.
 *
 * # Safety
 * `handle` must be a live experiment handle.
 */
uintptr_t pqw_experiment_num_vertices(const struct PqwExperiment *handle);

/**
 * Copies the per-step squared Hilbert-Schmidt distances from the
 * maximally mixed coin state; `len` must be at least steps + 1.
 *
 * # Safety
 * `handle` must be live and `out` must point to `len` doubles.
 */
enum PqwStatus pqw_experiment_distances(const struct PqwExperiment *handle,
                                        double *out,
                                        uintptr_t len);

/**
 * Copies the distance error bars (errorbars mode only); `len` must be at
 * least steps + 1.
 *
 * # Safety
 * `handle` must be live and `out` must point to `len` doubles.
 */
enum PqwStatus pqw_experiment_distance_errorbars(const struct PqwExperiment *handle,
                                                 double *out,
                                                 uintptr_t len);

/**
 * Copies the per-step Stokes parameters, row-major (s0, s1, s2, s3) per
 * step; `len` must be at least 4 * (steps + 1).
 *
 * # Safety
 * `handle` must be live and `out` must point to `len` doubles.
 */
enum PqwStatus pqw_experiment_stokes(const struct PqwExperiment *handle,
                                     double *out,
                                     uintptr_t len);

/**
 * Copies the averaged position distribution at `step`; `len` must be at
 * least the number of vertices.
 *
 * # Safety
 * `handle` must be live and `out` must point to `len` doubles.
 */
enum PqwStatus pqw_experiment_positions(const struct PqwExperiment *handle,
                                        uintptr_t step,
                                        double *out,
                                        uintptr_t len);

/**
 * Copies the vertex labels (centered on 0); `len` must be at least the
 * number of vertices.
 *
 * # Safety
 * `handle` must be live and `out` must point to `len` 64-bit integers.
 */
enum PqwStatus pqw_experiment_vertex_labels(const struct PqwExperiment *handle,
                                            int64_t *out,
                                            uintptr_t len);

/**
 * Text of the most recent failure on this thread. Never null; valid until
 * the next failing call on the same thread.
 */
const char *pqw_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *pqw_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PQW_H */
