#ifndef CATMADS_H
#define CATMADS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum CatmadsStatus {
  CATMADS_STATUS_OK = 0,
  CATMADS_STATUS_NULL_POINTER = 1,
  CATMADS_STATUS_INVALID_UTF8 = 2,
  CATMADS_STATUS_CONFIG = 3,
  CATMADS_STATUS_UNKNOWN_PROBLEM = 4,
  CATMADS_STATUS_DOMAIN = 5,
  CATMADS_STATUS_NO_FINITE_DOE = 6,
  CATMADS_STATUS_EXTERNAL = 7,
  CATMADS_STATUS_IO = 8,
  // The requested value does not exist (for example no feasible point).
  CATMADS_STATUS_NOT_FOUND = 9,
  CATMADS_STATUS_PANIC = 10,
  CATMADS_STATUS_OTHER = 11,
} CatmadsStatus;

// Solver settings.
typedef struct CatmadsConfig CatmadsConfig;

// A problem: variables plus a blackbox.
typedef struct CatmadsProblem CatmadsProblem;

// Outcome of a solve.
typedef struct CatmadsResult CatmadsResult;

// User evaluation callback. `point_json` is
// `{"cat":[labels],"int":[...],"cont":[...]}`. The callback writes the
// objective to `f` and `n_constraints` values to `g`, returning 0 on success
// and any other value for a failed evaluation.
typedef int (*CatmadsEvalFn)(void *user_data, const char *point_json, double *f, double *g);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *catmads_last_error(void);

// Library version as a static string.
const char *catmads_version(void);

// Releases a string returned by the library.
void catmads_string_free(char *s);

// Creates a built-in problem by registry name.
enum CatmadsStatus catmads_problem_builtin(const char *name, struct CatmadsProblem **out);

// Creates a problem from a definition (JSON, the problem-file format) and a
// callback evaluating it. The callback may run on several threads when the
// parallel mode is enabled.
enum CatmadsStatus catmads_problem_callback(const char *definition_json,
                                            CatmadsEvalFn callback,
                                            void *user_data,
                                            struct CatmadsProblem **out);

// Number of variables of a problem, or 0 for a null handle.
size_t catmads_problem_dimension(const struct CatmadsProblem *problem);

void catmads_problem_free(struct CatmadsProblem *problem);

// Default solver settings.
enum CatmadsStatus catmads_config_default(struct CatmadsConfig **out);

// Solver settings from JSON using the configuration field names.
enum CatmadsStatus catmads_config_from_json(const char *json, struct CatmadsConfig **out);

enum CatmadsStatus catmads_config_set_seed(struct CatmadsConfig *config, uint64_t seed);

// Sets the evaluation budget; 0 restores the per-variable default.
enum CatmadsStatus catmads_config_set_budget(struct CatmadsConfig *config, uint64_t budget);

// Sets the extended-poll trigger; infinities are allowed, NaN is not.
enum CatmadsStatus catmads_config_set_xi(struct CatmadsConfig *config, double xi);

// Configuration as JSON; release with [`catmads_string_free`].
char *catmads_config_to_json(const struct CatmadsConfig *config);

void catmads_config_free(struct CatmadsConfig *config);

// Runs the solver. Neither input handle is consumed.
enum CatmadsStatus catmads_solve(const struct CatmadsProblem *problem,
                                 const struct CatmadsConfig *config,
                                 struct CatmadsResult **out);

// Objective value of the best feasible point.
enum CatmadsStatus catmads_result_best_f(const struct CatmadsResult *result, double *f);

// Best feasible point as JSON, or null when there is none.
char *catmads_result_best_point(const struct CatmadsResult *result);

// Number of blackbox evaluations spent.
uint64_t catmads_result_evaluations(const struct CatmadsResult *result);

// Evaluation trace as CSV text.
char *catmads_result_trace_csv(const struct CatmadsResult *result);

// Termination reason: `"budget"` or `"mesh_minimum"`; release with
// [`catmads_string_free`].
char *catmads_result_termination(const struct CatmadsResult *result);

void catmads_result_free(struct CatmadsResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATMADS_H */
