#ifndef PWDYN_H
#define PWDYN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PwdynAnswer {
  PWDYN_ANSWER_NO = 0,
  PWDYN_ANSWER_YES = 1,
  PWDYN_ANSWER_UNKNOWN = 2,
} PwdynAnswer;

typedef enum PwdynSide {
  PWDYN_SIDE_MINUS = 0,
  PWDYN_SIDE_PLUS = 1,
} PwdynSide;

typedef enum PwdynStatus {
  PWDYN_STATUS_OK = 0,
  PWDYN_STATUS_NULL_ARGUMENT = 1,
  // Map text or a rational failed to parse, or an argument is out of range.
  PWDYN_STATUS_INVALID_INPUT = 2,
  // The value is undefined, as at a discontinuity.
  PWDYN_STATUS_UNDEFINED = 3,
  // A piece, power or denominator limit was reached.
  PWDYN_STATUS_LIMIT_REACHED = 4,
  // The question does not apply to this input.
  PWDYN_STATUS_PRECONDITION = 5,
  // A checked theorem failed; the message names the clause.
  PWDYN_STATUS_VIOLATION = 6,
  PWDYN_STATUS_PANIC = 7,
} PwdynStatus;

// Opaque handle to a validated piecewise affine map.
typedef struct PwdynMap PwdynMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string.
const char *pwdyn_version(void);

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *pwdyn_last_error(void);

// # Safety
// `s` must come from this library and not have been freed.
void pwdyn_string_free(char *s);

// Parses map file text into a new handle.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum PwdynStatus pwdyn_map_parse(const char *text, struct PwdynMap **out);

// # Safety
// `map` must come from this library and not have been freed.
void pwdyn_map_free(struct PwdynMap *map);

// Normalized map file text.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum PwdynStatus pwdyn_map_to_text(const struct PwdynMap *map, char **out);

// Number of pieces after merging collinear neighbours.
//
// # Safety
// `map` must be a live handle or null.
size_t pwdyn_map_piece_count(const struct PwdynMap *map);

// Value at `x`, `Undefined` at a discontinuity.
//
// # Safety
// `map` must be a live handle, `x` a NUL-terminated string, `out` writable.
enum PwdynStatus pwdyn_map_eval(const struct PwdynMap *map, const char *x, char **out);

// One-sided limit at `x`.
//
// # Safety
// As for `pwdyn_map_eval`.
enum PwdynStatus pwdyn_map_lateral_limit(const struct PwdynMap *map,
                                         const char *x,
                                         enum PwdynSide side,
                                         char **out);

// `{"S": [...], "T": [...], "D": [...]}`.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum PwdynStatus pwdyn_map_special_points(const struct PwdynMap *map, char **out);

// The composition `outer(inner(x))` as a new handle.
//
// # Safety
// `outer` and `inner` must be live handles; `out` must be writable.
enum PwdynStatus pwdyn_map_compose(const struct PwdynMap *outer,
                                   const struct PwdynMap *inner,
                                   struct PwdynMap **out);

// The `n`-th iterate as a new handle.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum PwdynStatus pwdyn_map_iterate(const struct PwdynMap *map, size_t n, struct PwdynMap **out);

// Stability of a confined point as JSON: class plus per-side verdicts.
//
// # Safety
// `map` must be a live handle, `x` a NUL-terminated string, `out` writable.
enum PwdynStatus pwdyn_classify(const struct PwdynMap *map, const char *x, char **out);

// Taxonomy of the continuous periodic orbit through `x` (period at most `horizon`).
//
// # Safety
// `map` must be a live handle, `x` a NUL-terminated string, `out` writable.
enum PwdynStatus pwdyn_taxonomy(const struct PwdynMap *map,
                                const char *x,
                                size_t horizon,
                                char **out);

// Orbit-count bound at `horizon`; `holds` receives whether the bound holds.
//
// # Safety
// `map` must be a live handle; `holds` and `out` must be writable or null.
enum PwdynStatus pwdyn_count_bound(const struct PwdynMap *map,
                                   size_t horizon,
                                   bool *holds,
                                   char **out);

// Whether the special point `w` is regular, deciding within `cap` steps.
//
// # Safety
// `map` must be a live handle, `w` a NUL-terminated string, `out` writable.
enum PwdynStatus pwdyn_is_regular(const struct PwdynMap *map,
                                  const char *w,
                                  size_t cap,
                                  enum PwdynAnswer *out);

// Runs the property suite; `names` is a comma-separated list or null for all.
// `ok` receives whether every property passed; `out` the JSON report without timings.
//
// # Safety
// `names` must be null or NUL-terminated; `ok` and `out` must be writable.
enum PwdynStatus pwdyn_run_suite(uint64_t seed,
                                 double scale,
                                 const char *names,
                                 bool *ok,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PWDYN_H */
