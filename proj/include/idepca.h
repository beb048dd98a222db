/* C interface to the idepca library: simulation and oscillation analysis of
 * first-order linear impulsive delay equations with a piecewise constant
 * argument,
 *
 *   x'(t) + a(t) x(t) + b(t) x(t - tau) + c(t) x([t - 1]) = 0,  t != t_i,
 *   x(t_i+) = x(t_i-) / (1 - b_i),
 *
 * where [.] is the floor function. Handles are opaque; every fallible call
 * returns a status code and leaves a human-readable message in
 * idepca_last_error() (thread-local). Strings returned through char** are
 * heap-allocated and must be released with idepca_string_free(). Distinct
 * handles can be used from distinct threads concurrently.
 */

#ifndef IDEPCA_H
#define IDEPCA_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum idepca_status {
  IDEPCA_OK = 0,
  IDEPCA_ERR_IO = 2,         /* unreadable file */
  IDEPCA_ERR_PARSE = 3,      /* malformed problem text or expression */
  IDEPCA_ERR_VALIDATION = 4, /* structurally invalid problem */
  IDEPCA_ERR_DOMAIN = 5,     /* expression evaluation failed (log of <= 0, ...) */
  IDEPCA_ERR_SOLVER = 6,     /* integration failed */
  IDEPCA_ERR_QUADRATURE = 7, /* window integral did not converge */
  IDEPCA_ERR_ARGUMENT = 8,   /* null handle, index out of range, bad option */
  IDEPCA_ERR_INTERNAL = 9
} idepca_status;

typedef struct idepca_problem idepca_problem;
typedef struct idepca_trajectory idepca_trajectory;
typedef struct idepca_analysis idepca_analysis;
typedef struct idepca_detection idepca_detection;

const char* idepca_version(void);

/* Message from the most recent failing call on this thread ("" if none). */
const char* idepca_last_error(void);

void idepca_string_free(char* s);

/* ---- problems ---------------------------------------------------------- */

/* Parses and validates a problem file. overrides is an optional array of
 * "key=value" assignments applied on top of the file's entries (pass NULL /
 * 0 for none). Validation warnings are retained on the handle. */
idepca_status idepca_problem_load(const char* path, const char* const* overrides,
                                  size_t n_overrides, idepca_problem** out);

/* Same, from in-memory text. */
idepca_status idepca_problem_parse(const char* text, const char* const* overrides,
                                   size_t n_overrides, idepca_problem** out);

/* Text of a built-in demonstration problem (id 1 or 2). */
idepca_status idepca_example_text(int id, char** out_text);

void idepca_problem_free(idepca_problem* p);

double idepca_problem_t0(const idepca_problem* p);
double idepca_problem_tau(const idepca_problem* p);
double idepca_problem_horizon(const idepca_problem* p);
size_t idepca_problem_warning_count(const idepca_problem* p);
/* Warning with the given index, formatted "CODE: message". */
idepca_status idepca_problem_warning(const idepca_problem* p, size_t index, char** out);

/* ---- simulation -------------------------------------------------------- */

/* Integrates from t0. horizon <= 0 means the problem file's horizon;
 * h_max <= 0 means the default maximum step (1e-3). */
idepca_status idepca_simulate(const idepca_problem* p, double horizon, double h_max,
                              idepca_trajectory** out);

void idepca_trajectory_free(idepca_trajectory* t);

double idepca_trajectory_start(const idepca_trajectory* t);
double idepca_trajectory_end(const idepca_trajectory* t);
size_t idepca_trajectory_segment_count(const idepca_trajectory* t);
size_t idepca_trajectory_jump_count(const idepca_trajectory* t);

/* Dense-output evaluation. side < 0 gives the limit from below; side >= 0
 * the (right-continuous) value. */
idepca_status idepca_trajectory_value(const idepca_trajectory* t, double time, int side,
                                      double* out);

/* CSV "t,x,side": one row per step boundary, jump times emitted twice with
 * side "-" then "+", plain rows side ".". */
idepca_status idepca_trajectory_csv(const idepca_trajectory* t, char** out);

/* ---- oscillation criteria ---------------------------------------------- */

/* Evaluates every applicable sufficient oscillation condition on a scan
 * grid. Pass NaN for any of scan_start / scan_end / stride / margin to take
 * the defaults (t0 + max(tau, 2), start + 50, 0.05, 1e-6). */
idepca_status idepca_check(const idepca_problem* p, double scan_start, double scan_end,
                           double stride, double margin, idepca_analysis** out);

void idepca_analysis_free(idepca_analysis* a);

/* 1 when some condition is satisfied at the horizon. */
int idepca_analysis_certified(const idepca_analysis* a);
size_t idepca_analysis_report_count(const idepca_analysis* a);
/* Condition name ("T2-b", "C3", ...); NULL when index is out of range. */
const char* idepca_analysis_condition(const idepca_analysis* a, size_t index);
int idepca_analysis_satisfied(const idepca_analysis* a, size_t index);
double idepca_analysis_tail(const idepca_analysis* a, size_t index);
double idepca_analysis_threshold(const idepca_analysis* a, size_t index);

/* CSV "condition,window_t,value" over the full scan series. */
idepca_status idepca_analysis_csv(const idepca_analysis* a, char** out);

/* ---- impulse-removal transform ----------------------------------------- */

/* CSV "t,product,B,C" on a uniform grid over [t0, horizon] (horizon <= 0
 * means the problem's horizon): the jump product over (t0, t] and the
 * coefficients of the rescaled jump-free equation. */
idepca_status idepca_transform_csv(const idepca_problem* p, double horizon, int grid, char** out);

/* Integrates the impulsive and the rescaled jump-free formulations and
 * compares them: pass iff max |product * x - y| <= tol * (1 + max |y|).
 * h_max <= 0 means the default step. */
idepca_status idepca_verify_transform(const idepca_problem* p, double horizon, double tol,
                                      double h_max, double* out_deviation, int* out_pass);

/* ---- sign-change detection --------------------------------------------- */

/* Scans a trajectory for sign changes. atol < 0 (or NaN) means the
 * scale-aware default 1e-9 * (1 + max |x|). The trajectory must span at
 * least 4 time units. */
idepca_status idepca_detect(const idepca_trajectory* t, double atol, idepca_detection** out);

void idepca_detection_free(idepca_detection* d);

/* 1 = OscillatoryDetected, 0 = SignConstantAtHorizon. */
int idepca_detection_oscillatory(const idepca_detection* d);
const char* idepca_detection_class_name(const idepca_detection* d);
size_t idepca_detection_change_count(const idepca_detection* d);
idepca_status idepca_detection_change_time(const idepca_detection* d, size_t index, double* out);
double idepca_detection_atol(const idepca_detection* d);
double idepca_detection_zero_fraction(const idepca_detection* d);

/* CSV "change_t": one row per detected change. */
idepca_status idepca_detection_csv(const idepca_detection* d, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IDEPCA_H */
