#ifndef ROBSAT_H
#define ROBSAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum RobsatStatus {
  ROBSAT_STATUS_OK = 0,
  ROBSAT_STATUS_NULL_POINTER = 1,
  ROBSAT_STATUS_INVALID_UTF8 = 2,
  ROBSAT_STATUS_PARSE_ERROR = 3,
  ROBSAT_STATUS_INVALID_ARGUMENT = 4,
  ROBSAT_STATUS_INTERNAL = 5,
  ROBSAT_STATUS_PANIC = 6,
} RobsatStatus;

/*
 Outcome of a robust satisfiability query.
 */
typedef enum RobsatVerdict {
  ROBSAT_VERDICT_ROBUST_YES = 0,
  ROBSAT_VERDICT_ROBUST_NO = 1,
  ROBSAT_VERDICT_UNKNOWN = 2,
} RobsatVerdict;

/*
 Opaque handle to a parsed instance.
 */
typedef struct RobsatInstance RobsatInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, or NULL. Valid until
 the next call into this library from the same thread.
 */
const char *robsat_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *robsat_version(void);

/*
 Parses an instance from JSON text.

 # Safety
 `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RobsatStatus robsat_instance_from_json(const char *json, struct RobsatInstance **out);

/*
 Releases an instance. Passing NULL is a no-op.

 # Safety
 `inst` must come from `robsat_instance_from_json` and not be used afterwards.
 */
void robsat_instance_free(struct RobsatInstance *inst);

/*
 Overrides the norm (`"l1"`, `"l2"` or `"linf"`).

 # Safety
 `inst` must be a live handle and `norm` a valid NUL-terminated string.
 */
enum RobsatStatus robsat_instance_set_norm(struct RobsatInstance *inst, const char *norm);

/*
 Number of vertices of the instance's complex.

 # Safety
 `inst` must be a live handle.
 */
enum RobsatStatus robsat_instance_num_vertices(const struct RobsatInstance *inst, size_t *out);

/*
 Decides robust satisfiability at `alpha` (`"p/q"` or `"sqrt:p/q"`); NULL
 uses the instance's own alpha.

 # Safety
 `inst` must be a live handle, `alpha` NULL or a valid string, `out` valid.
 */
enum RobsatStatus robsat_decide(const struct RobsatInstance *inst,
                                const char *alpha,
                                bool assume_hopf,
                                enum RobsatVerdict *out);

/*
 Computes the robustness value as a JSON document, e.g.
 `{"kind":"value","value":"1"}`.

 # Safety
 `inst` must be a live handle and `out` a valid pointer.
 */
enum RobsatStatus robsat_robustness_json(const struct RobsatInstance *inst,
                                         bool assume_hopf,
                                         char **out);

/*
 Critical values of `|f|` as a JSON array.

 # Safety
 `inst` must be a live handle and `out` a valid pointer.
 */
enum RobsatStatus robsat_critical_values_json(const struct RobsatInstance *inst, char **out);

/*
 Releases a string returned by this library. Passing NULL is a no-op.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void robsat_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBSAT_H */
