/*
 * regstop: nonlinear Landweber iteration with heuristic stopping rules.
 *
 * C interface to the shared library. Every function is thread-safe; error
 * state is kept per thread. Calls that can fail either return NULL / a
 * negative count or set an explicit status; the cause is then available
 * from regstop_last_status() and regstop_last_message() on the same
 * thread. Strings and arrays returned as char* / allocated buffers must be
 * released with regstop_free(). Handles have their own close functions.
 */

#ifndef REGSTOP_H
#define REGSTOP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum regstop_status {
  REGSTOP_OK = 0,
  REGSTOP_INVALID_ARGUMENT = 1,
  REGSTOP_NOT_FOUND = 2,
  REGSTOP_DOMAIN_ERROR = 3,
  REGSTOP_CONFIG_ERROR = 4,
  REGSTOP_IO_ERROR = 5,
  REGSTOP_RUNTIME_ERROR = 6,
};

/* Library version as "major.minor.patch". Static storage, do not free. */
const char* regstop_version(void);

/* Status and message of the most recent failed call on this thread.
 * Successful calls reset the status to REGSTOP_OK but keep the message. */
int regstop_last_status(void);
const char* regstop_last_message(void);

/* Releases any buffer documented as "free with regstop_free". NULL is ok. */
void regstop_free(void* ptr);

/* ------------------------------------------------------------------ */
/* Problem registry                                                    */

typedef struct regstop_problem regstop_problem;

int regstop_problem_count(void);
/* Registry name at index, NULL if out of range. Static storage. */
const char* regstop_problem_name_at(int index);

/* Opens a registered problem. n = 0 and fine_factor = 0 keep the problem
 * defaults; fine_factor only affects problems that synthesize data on a
 * finer grid. Returns NULL on error. */
regstop_problem* regstop_problem_open(const char* name, int n, int fine_factor);
void regstop_problem_close(regstop_problem* p);

const char* regstop_problem_name(const regstop_problem* p);
/* Number of samples of a domain / range vector (the array lengths every
 * function below expects). Negative on error. */
int regstop_problem_domain_size(const regstop_problem* p);
int regstop_problem_range_size(const regstop_problem* p);

/* Forward map y = F(x), derivative y = F'(x) h, adjoint out = F'(x)^* r.
 * All arrays are caller-allocated with the sizes above. Returns 0 on
 * success, -1 on error (x outside the domain reports REGSTOP_DOMAIN_ERROR). */
int regstop_problem_apply(const regstop_problem* p, const double* x, double* y);
int regstop_problem_deriv(const regstop_problem* p, const double* x,
                          const double* h, double* out);
int regstop_problem_adjoint(const regstop_problem* p, const double* x,
                            const double* r, double* out);

/* 1 if x satisfies the domain constraints, 0 if not, -1 on error. When a
 * reason buffer is given the violation is described there (truncated to
 * reason_cap bytes, always NUL-terminated). */
int regstop_problem_domain_check(const regstop_problem* p, const double* x,
                                 char* reason, int reason_cap);

/* ------------------------------------------------------------------ */
/* Benchmark setup shipped with each problem                           */

int regstop_problem_exact(const regstop_problem* p, double* x_out);
int regstop_problem_start(const regstop_problem* p, double* x_out);
double regstop_problem_tau(const regstop_problem* p);
int regstop_problem_kmax(const regstop_problem* p);
int regstop_problem_delta_count(const regstop_problem* p);
double regstop_problem_delta_at(const regstop_problem* p, int index);

/* Exact data for the benchmark solution (finer-grid synthesis where the
 * problem defines it). y has range size. */
int regstop_problem_synthesize(const regstop_problem* p, double* y);

/* Gaussian noise rescaled to an exact relative L2 level. y_out may alias
 * y. The absolute level delta_abs = delta_rel * ||y|| is written when the
 * pointer is non-NULL. */
int regstop_problem_add_noise(const regstop_problem* p, const double* y,
                              double delta_rel, uint64_t seed, double* y_out,
                              double* delta_abs_out);

/* Operator gate in one call: best relative error of the derivative
 * against central differences over a step sweep, and the worst relative
 * adjoint defect |<F'h, r> - <h, F'* r>| over `trials` random pairs, both
 * at a reproducible random interior point. Returns 0 on success. */
int regstop_problem_check(const regstop_problem* p, uint64_t seed, int trials,
                          double* fd_err_out, double* adjoint_err_out);

/* omega = safety / ||F'(x_ref)||^2 with x_ref the exact solution (at_start
 * = 0) or the benchmark starting point (at_start = 1). Negative on error. */
double regstop_problem_auto_stepsize(const regstop_problem* p, int at_start,
                                     double safety);

/* ------------------------------------------------------------------ */
/* Paired Landweber iteration                                          */

typedef struct regstop_trace regstop_trace;

/* Runs the doubled-index iteration against y_delta (range size). x0 = NULL
 * starts from the benchmark starting point. with_error != 0 records the
 * exact-solution error series (benchmark mode). omega must be positive;
 * kmax is the tortoise index bound. divergence_radius <= 0 and
 * residual_blowup <= 0 disable the respective guard. NULL on error. */
regstop_trace* regstop_run_paired(const regstop_problem* p,
                                  const double* y_delta, const double* x0,
                                  double omega, int kmax,
                                  double divergence_radius,
                                  double residual_blowup, int with_error);
void regstop_trace_close(regstop_trace* t);

/* Last index of the tortoise series (residual, error, dist_to_x0) and of
 * the paired series (qo, ls, hr_pair). Negative on error. */
int regstop_trace_residual_limit(const regstop_trace* t);
int regstop_trace_paired_limit(const regstop_trace* t);

/* Why the sequence stopped: "completed", "domain_violation",
 * "radius_exceeded", "residual_blowup" or "non_finite". Static storage. */
const char* regstop_trace_termination(const regstop_trace* t);
/* First invalid sequence index, -1 when the run completed. */
long long regstop_trace_termination_index(const regstop_trace* t);
long long regstop_trace_forward_evals(const regstop_trace* t);
long long regstop_trace_adjoint_evals(const regstop_trace* t);

/* Copies one recorded series into out (capacity entries). Names:
 * "residual", "error", "dist_to_x0", "qo", "ls", "hr_pair". Returns the
 * series length, or the required length if out is NULL, or -1 on error
 * (including capacity too small). */
int regstop_trace_series(const regstop_trace* t, const char* name,
                         double* out, int capacity);

/* ------------------------------------------------------------------ */
/* Stopping rules                                                      */

typedef struct {
  char rule[8];
  int attained; /* 0 or 1; the fields below are undefined when 0 */
  long long k_star;
  double psi_at_kstar;
  int boundary_hit;
  int window_min;
  int window_max;
} regstop_decision;

/* Applies one rule to a recorded trace. rule is "dp", "hd", "hr", "qo",
 * "ls" or "opt". Heuristics scan [k_min, k_max_search] (k_max_search = 0
 * means the full defined range); "dp" reads tau and delta_abs instead and
 * "opt" needs a trace recorded with with_error. Returns 0 on success. */
int regstop_decide(const regstop_trace* t, const char* rule, int k_min,
                   int k_max_search, double tau, double delta_abs,
                   regstop_decision* out);

/* ------------------------------------------------------------------ */
/* Experiment driver                                                   */

typedef struct regstop_config regstop_config;
typedef struct regstop_report regstop_report;

/* Empty configuration; keys are set one by one. */
regstop_config* regstop_config_new(void);
/* Configuration from a key = value file. NULL on parse or io error. */
regstop_config* regstop_config_load(const char* path);
/* Sets (or overrides) one key. Values are validated when the experiment
 * runs, not here. Returns 0 on success. */
int regstop_config_set(regstop_config* c, const char* key, const char* value);
void regstop_config_close(regstop_config* c);

/* Runs the configured experiment. NULL on error; invalid configurations
 * report REGSTOP_CONFIG_ERROR with one message line per offending key. */
regstop_report* regstop_experiment_run(const regstop_config* c);
void regstop_report_close(regstop_report* r);

typedef struct {
  char problem[32];
  double delta_rel;
  double delta_abs;
  uint64_t seed;
  char rule[8];
  long long k_star; /* -1 when not attained */
  int attained;
  int boundary_hit;
  double abs_error;   /* NaN when not attained */
  double error_ratio; /* NaN when not attained */
  double k_ratio;     /* NaN when not attained */
  double wall_time_ms;
} regstop_row;

long long regstop_report_row_count(const regstop_report* r);
int regstop_report_row(const regstop_report* r, long long index,
                       regstop_row* out);
double regstop_report_omega(const regstop_report* r);

/* Full report as CSV text / fixed-width summary table. Free the result
 * with regstop_free. NULL on error. */
char* regstop_report_csv(const regstop_report* r);
char* regstop_report_summary(const regstop_report* r);

/* Writes report.csv to the given path, or one per-run series file
 * (series_<problem>_d<i>_s<seed>.csv) into the given directory, which is
 * created if needed. Returns 0 on success. */
int regstop_report_write_csv(const regstop_report* r, const char* path);
int regstop_report_write_series(const regstop_report* r, const char* dir);

/* Writes report.csv plus any recorded series files into dir (NULL uses
 * the configured output_dir). Returns 0 on success. */
int regstop_report_write(const regstop_report* r, const char* dir);

/* ------------------------------------------------------------------ */
/* Spectral diagnostics                                                */

/* Diagnostic report for one problem as a JSON object: the Gram-weighted
 * Jacobian spectrum at the chosen linearization point together with the
 * source/noise decay constants and the tangential-cone ratio sampled on a
 * sphere around it.
 *
 *   at         "dagger" (exact solution) or "start"
 *   delta_rel  noise level entering the noise-side constants
 *   seed       noise and sampling seed
 *   tcc_radius sphere radius; <= 0 picks 0.1 * ||x_dagger - x0||
 *   tcc_samples number of sphere points; <= 0 picks 64
 *
 * Free the returned string with regstop_free. NULL on error. */
char* regstop_diagnose(const regstop_problem* p, const char* at,
                       double delta_rel, uint64_t seed, double tcc_radius,
                       int tcc_samples);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* REGSTOP_H */
