#ifndef QUADCOVER_H
#define QUADCOVER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  QC_STATUS_INVALID_ARGUMENT = 2,
  QC_STATUS_TOO_LARGE = 3,
  QC_STATUS_OUT_OF_RANGE = 4,
  QC_STATUS_BUFFER_TOO_SMALL = 5,
  QC_STATUS_CHECK_FAILED = 6,
  QC_STATUS_INTERNAL = 7,
  QC_STATUS_PANIC = 8,
} QcStatus;

/**
 * A quadric model with its ovoid geometry and tangency graph, built on
 * first use.
 */
typedef struct QcModel QcModel;

typedef struct QcModelCounts {
  uint32_t q;
  uint32_t points_q;
  uint32_t points_q0;
  uint32_t lines_q;
  uint32_t lines_q0;
} QcModelCounts;

typedef struct QcCliqueCounts {
  uint64_t n3;
  uint64_t n4;
  uint64_t n5;
  uint64_t n6;
} QcCliqueCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the model for GF(2^n). `modulus` 0 and `lambda` 0 select the
 * defaults.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QcStatus qc_model_new(uint32_t n, uint32_t modulus, uint32_t lambda, struct QcModel **out);

/**
 * # Safety
 * `model` must come from `qc_model_new` and not be used afterwards.
 */
void qc_model_free(struct QcModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
enum QcStatus qc_model_counts(const struct QcModel *model, struct QcModelCounts *out);

/**
 * Writes the six coordinate bit patterns of point `index` of Q.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for 6 writes.
 */
enum QcStatus qc_point_coords(const struct QcModel *model, uint32_t index, uint16_t *out);

/**
 * Number of elliptic ovoids of Q0.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
enum QcStatus qc_ovoid_count(const struct QcModel *model, uint32_t *out);

/**
 * Whether ovoids `a` and `b` are tangent.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
enum QcStatus qc_ovoids_tangent(const struct QcModel *model, uint32_t a, uint32_t b, bool *out);

/**
 * Full census of non-linear cliques; fails with `CheckFailed` when the
 * census report does not pass.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
enum QcStatus qc_census(const struct QcModel *model, struct QcCliqueCounts *out);

/**
 * Closed-form clique counts for GF(2^n), 1 <= n <= 9.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QcStatus qc_formula_counts(uint32_t n, struct QcCliqueCounts *out);

/**
 * Runs a command line such as `"census --n 2"` and writes its JSON report.
 * Returns `CheckFailed` (with the report still written) when a check fails.
 *
 * # Safety
 * `args` must be a NUL-terminated string; `buf` must be valid for `cap`
 * bytes or null; `needed` must be valid for writes or null.
 */
enum QcStatus qc_run_json(const char *args, char *buf, size_t cap, size_t *needed);

/**
 * Copies the message of the last failure on this thread.
 *
 * # Safety
 * As for `qc_run_json`.
 */
enum QcStatus qc_last_error(char *buf, size_t cap, size_t *needed);

/**
 * Static description of a status code.
 */
const char *qc_status_str(enum QcStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUADCOVER_H */
