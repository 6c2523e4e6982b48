#ifndef ASBEC_H
#define ASBEC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum AsbecStatus {
  ASBEC_STATUS_OK = 0,
  ASBEC_STATUS_NULL_POINTER = 1,
  ASBEC_STATUS_INVALID_ARGUMENT = 2,
  ASBEC_STATUS_UNKNOWN_FUNCTION = 3,
  ASBEC_STATUS_UNKNOWN_CONFIG = 4,
  ASBEC_STATUS_INVALID_CONFIG = 5,
  ASBEC_STATUS_OUT_OF_RANGE = 6,
  ASBEC_STATUS_BUFFER_TOO_SMALL = 7,
  ASBEC_STATUS_INTERNAL = 8,
} AsbecStatus;

// A finished run.
typedef struct AsbecRun AsbecRun;

// One entry of a best-so-far trace.
typedef struct AsbecPoint {
  uint64_t evals;
  uint64_t time;
  double best_f;
} AsbecPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *asbec_last_error_message(void);

// Number of benchmark functions.
size_t asbec_function_count(void);

// Id of function `index` as a static string, or null when out of range.
const char *asbec_function_name(size_t index);

// Runs the named configuration on `function` and stores the handle in `*out`.
//
// # Safety
// `function` and `config` must be NUL-terminated strings and `out` a valid
// pointer to writable storage.
enum AsbecStatus asbec_run_new(const char *function,
                               const char *config,
                               uint64_t seed,
                               uint64_t budget,
                               struct AsbecRun **out);

// Like [`asbec_run_new`], with the configuration given as a JSON object
// (`label`, optional `tech`, `plan` and `budget`). The budget defaults to 1600.
//
// # Safety
// Same as [`asbec_run_new`].
enum AsbecStatus asbec_run_from_json(const char *function,
                                     const char *json,
                                     uint64_t seed,
                                     struct AsbecRun **out);

// Releases a run. Null is ignored.
//
// # Safety
// `run` must come from this library and not be used afterwards.
void asbec_run_free(struct AsbecRun *run);

// Number of trace points, one per function evaluation. Zero for null.
//
// # Safety
// `run` must be null or a live handle.
size_t asbec_run_len(const struct AsbecRun *run);

// Copies trace point `index` into `*point`.
//
// # Safety
// `run` must be a live handle and `point` writable.
enum AsbecStatus asbec_run_point(const struct AsbecRun *run,
                                 size_t index,
                                 struct AsbecPoint *point);

// Best objective value found.
//
// # Safety
// `run` must be a live handle and `best_f` writable.
enum AsbecStatus asbec_run_best_f(const struct AsbecRun *run, double *best_f);

// Copies the best position into `buf`. `*dim` receives the dimension in
// every case; a short buffer yields `BufferTooSmall` and nothing is copied,
// so a null `buf` with `len` 0 queries the size.
//
// # Safety
// `run` must be a live handle, `dim` writable, and `buf` valid for `len`
// doubles when `len` is non-zero.
enum AsbecStatus asbec_run_best_position(const struct AsbecRun *run,
                                         double *buf,
                                         size_t len,
                                         size_t *dim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ASBEC_H */
