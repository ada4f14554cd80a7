#ifndef IQPLS_H
#define IQPLS_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IqplsError {
  IQPLS_ERROR_OK = 0,
  IQPLS_ERROR_NULL_POINTER = 1,
  IQPLS_ERROR_INVALID_UTF8 = 2,
  IQPLS_ERROR_IO = 3,
  IQPLS_ERROR_PARSE = 4,
  IQPLS_ERROR_MODEL = 5,
  IQPLS_ERROR_CONFIG = 6,
  IQPLS_ERROR_BUFFER_TOO_SMALL = 7,
  IQPLS_ERROR_PANIC = 8,
} IqplsError;

typedef enum IqplsFormat {
  IQPLS_FORMAT_QPLIB = 0,
  IQPLS_FORMAT_CANONICAL = 1,
} IqplsFormat;

typedef enum IqplsStatus {
  IQPLS_STATUS_FEASIBLE = 0,
  /**
   * No feasible assignment found before the cutoff.
   */
  IQPLS_STATUS_NOT_FOUND = 1,
} IqplsStatus;

typedef struct IqplsProblem IqplsProblem;

typedef struct IqplsResult IqplsResult;

/**
 * Solver settings. Fill with [`iqpls_config_default`] before changing fields.
 */
typedef struct IqplsConfig {
  double time_limit;
  uint64_t seed;
  uint32_t bms_samples;
  uint64_t obj_weight_cap;
  bool disable_exp;
  bool disable_inc;
  bool disable_free;
  /**
   * Use the objective slice of both variables in the equality move.
   */
  bool literal_both_theta;
  /**
   * Iteration budget, 0 for none.
   */
  uint64_t max_iterations;
  /**
   * Iterations without a new best before a random reassignment, 0 to
   * disable.
   */
  uint64_t stagnation_limit;
} IqplsConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *iqpls_last_error(void);

struct IqplsConfig iqpls_config_default(void);

/**
 * Parses a problem from a NUL-terminated string.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum IqplsError iqpls_problem_from_str(const char *text,
                                       enum IqplsFormat format,
                                       struct IqplsProblem **out);

/**
 * Reads and parses a problem file.
 *
 * # Safety
 * `path` must be a valid C string and `out` a valid pointer.
 */
enum IqplsError iqpls_problem_from_file(const char *path,
                                        enum IqplsFormat format,
                                        struct IqplsProblem **out);

/**
 * # Safety
 * `problem` must come from this library and not be used afterwards.
 */
void iqpls_problem_free(struct IqplsProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle.
 */
size_t iqpls_problem_num_vars(const struct IqplsProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle.
 */
size_t iqpls_problem_num_constraints(const struct IqplsProblem *problem);

/**
 * Runs the solver. A null `config` uses the defaults.
 *
 * # Safety
 * `problem` must be a live handle, `config` null or valid, `out` valid.
 */
enum IqplsError iqpls_solve(const struct IqplsProblem *problem,
                            const struct IqplsConfig *config,
                            struct IqplsResult **out);

/**
 * # Safety
 * `result` must come from this library and not be used afterwards.
 */
void iqpls_result_free(struct IqplsResult *result);

/**
 * # Safety
 * `result` must be a live handle.
 */
enum IqplsStatus iqpls_result_status(const struct IqplsResult *result);

/**
 * Best objective in the problem's declared sense. Writes nothing and
 * returns false when no feasible assignment was found.
 *
 * # Safety
 * `result` must be a live handle and `objective` valid.
 */
bool iqpls_result_objective(const struct IqplsResult *result, double *objective);

/**
 * # Safety
 * `result` must be a live handle.
 */
uint64_t iqpls_result_iterations(const struct IqplsResult *result);

/**
 * # Safety
 * `result` must be a live handle.
 */
double iqpls_result_elapsed(const struct IqplsResult *result);

/**
 * Copies the best assignment into `values`, which holds `len` entries.
 * `written` receives the number of variables even when the buffer is too
 * small. Fails with `Model` when the result has no assignment.
 *
 * # Safety
 * `result` must be a live handle, `values` valid for `len` writes, and
 * `written` null or valid.
 */
enum IqplsError iqpls_result_values(const struct IqplsResult *result,
                                    int64_t *values,
                                    size_t len,
                                    size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IQPLS_H */
