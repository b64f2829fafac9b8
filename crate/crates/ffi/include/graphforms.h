#ifndef GRAPHFORMS_H
#define GRAPHFORMS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_ARGUMENT = 1,
  GF_STATUS_INVALID_UTF8 = 2,
  GF_STATUS_IO_ERROR = 3,
  GF_STATUS_PARSE_ERROR = 4,
  GF_STATUS_DOMAIN_ERROR = 5,
} GfStatus;

// Opaque handle for a parsed and validated problem.
typedef struct GfProblem GfProblem;

// Opaque handle for a finished report.
typedef struct GfReport GfReport;

// Options for [`gf_run`]. `mu_max <= 0` and `grid == 0` mean
// "use the problem's solver configuration".
typedef struct GfRunOptions {
  uint64_t seed;
  uint32_t trials;
  double tol;
  double mu_max;
  uint32_t grid;
} GfRunOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Default options: seed 0, 20 trials, tolerance 1e-9, solver settings from
// the problem file.
struct GfRunOptions gf_run_options_default(void);

// Parses a problem file from disk. On success writes a handle to `out`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum GfStatus gf_problem_load(const char *path, struct GfProblem **out);

// Parses a problem document from a JSON string.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GfStatus gf_problem_from_json(const char *json, struct GfProblem **out);

// Loads one of the bundled presets by name.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum GfStatus gf_problem_preset(const char *name, struct GfProblem **out);

// Releases a problem handle. Null is ignored.
//
// # Safety
// `p` must come from this library and not be freed twice.
void gf_problem_free(struct GfProblem *p);

// Runs a verification command (`betti`, `index`, `hodge`, `spectrum`,
// `relations`, `metric-kernel`, `metric-spectrum`, `scatter`, `curvature`,
// `fuzz`) and writes a report handle to `out`.
//
// # Safety
// All pointers must be valid; `command` NUL-terminated.
enum GfStatus gf_run(const struct GfProblem *problem,
                     const char *command,
                     const struct GfRunOptions *options,
                     struct GfReport **out);

// 1 when every check in the report passed, 0 otherwise.
//
// # Safety
// `report` must be a live handle from [`gf_run`].
int32_t gf_report_passed(const struct GfReport *report);

// JSON rendering of the report; free with [`gf_string_free`].
//
// # Safety
// `report` must be a live handle from [`gf_run`].
char *gf_report_json(const struct GfReport *report);

// Text-table rendering of the report; free with [`gf_string_free`].
//
// # Safety
// `report` must be a live handle from [`gf_run`].
char *gf_report_text(const struct GfReport *report);

// Releases a report handle. Null is ignored.
//
// # Safety
// `r` must come from this library and not be freed twice.
void gf_report_free(struct GfReport *r);

// Copy of the most recent error message on this thread, or null; free with
// [`gf_string_free`].
char *gf_last_error(void);

// Releases a string allocated by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void gf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHFORMS_H */
