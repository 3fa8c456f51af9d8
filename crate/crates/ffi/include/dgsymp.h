#ifndef DGSYMP_H
#define DGSYMP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum DgsympStatus {
  DGSYMP_STATUS_OK = 0,
  // The computation ran and a check failed.
  DGSYMP_STATUS_CHECK_FAILED = 1,
  // Input text did not parse.
  DGSYMP_STATUS_PARSE_ERROR = 2,
  // The input was rejected (precondition, degree or validity error).
  DGSYMP_STATUS_INVALID = 3,
  // A required pointer was null or a string was not UTF-8.
  DGSYMP_STATUS_BAD_ARGUMENT = 4,
  // Internal panic; the handle arguments are left untouched.
  DGSYMP_STATUS_PANIC = 5,
} DgsympStatus;

// A semifree cdga presentation.
typedef struct DgsympAlgebra DgsympAlgebra;

// Truncation bounds for cohomology and forms.
typedef struct DgsympTruncation {
  int32_t window_lo;
  int32_t window_hi;
  uint32_t max_polydeg;
  int64_t max_weight;
  uint32_t max_wedge;
} DgsympTruncation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *dgsymp_last_error(void);

// Version tag of the JSON reports (static string).
const char *dgsymp_schema_version(void);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void dgsymp_string_free(char *s);

// Parse a presentation; on success `*out` owns a new handle.
//
// # Safety
// `src` must be a nul-terminated string and `out` a valid pointer.
enum DgsympStatus dgsymp_algebra_parse(const char *src, struct DgsympAlgebra **out);

// Release a handle. Null is ignored.
//
// # Safety
// `a` must come from this library and not have been freed.
void dgsymp_algebra_free(struct DgsympAlgebra *a);

// Number of generators, or 0 for a null handle.
//
// # Safety
// `a` must be null or a live handle.
size_t dgsymp_algebra_generator_count(const struct DgsympAlgebra *a);

// Canonical text of the presentation.
//
// # Safety
// `a` must be a live handle and `out` a valid pointer.
enum DgsympStatus dgsymp_algebra_to_text(const struct DgsympAlgebra *a, char **out);

// `T*[d]` of the base, twisted by `potential` when it is non-null; `*out`
// receives the total space.
//
// # Safety
// `base` must be a live handle, `potential` null or a nul-terminated
// string, and `out` a valid pointer.
enum DgsympStatus dgsymp_shifted_cotangent(const struct DgsympAlgebra *base,
                                           int32_t d,
                                           const char *potential,
                                           struct DgsympAlgebra **out);

// Check that `omega` is a `d`-shifted symplectic form. `*report` receives
// the JSON report whenever the checks ran, pass or fail.
//
// # Safety
// `a` must be a live handle, `omega` a nul-terminated string and `report`
// a valid pointer.
enum DgsympStatus dgsymp_verify_symplectic(const struct DgsympAlgebra *a,
                                           const char *omega,
                                           int32_t d,
                                           struct DgsympTruncation trunc,
                                           char **report_out);

// Darboux normal form. `witness` uses the witness file grammar.
//
// # Safety
// `a` must be a live handle, `omega` and `witness` nul-terminated strings
// and `report` a valid pointer.
enum DgsympStatus dgsymp_darboux(const struct DgsympAlgebra *a,
                                 const char *omega,
                                 int32_t d,
                                 const char *witness,
                                 struct DgsympTruncation trunc,
                                 char **report_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DGSYMP_H */
