/* C interface to the min-max stationarity library. All functions return a
 * status code; on failure mmx_last_error() describes the problem (per thread). */
#ifndef MMX_H
#define MMX_H

#include <stddef.h>
#include <stdint.h>

#if defined(MMX_BUILDING_LIBRARY)
#define MMX_API __attribute__((visibility("default")))
#else
#define MMX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  MMX_OK = 0,
  MMX_ASSERTION = 1,
  MMX_CONFIG = 2,
  MMX_BUDGET = 3,
  MMX_NUMERICAL = 4,
  MMX_INVALID_ARGUMENT = 5,
  MMX_UNSUPPORTED = 6,
  MMX_REGIME = 7,
  MMX_IO = 8
} mmx_status;

typedef struct mmx_problem mmx_problem;
typedef struct mmx_run mmx_run;
typedef struct mmx_experiment mmx_experiment;

MMX_API const char* mmx_version(void);
MMX_API const char* mmx_last_error(void);
MMX_API const char* mmx_status_name(mmx_status s);

/* ---- problems ---- */

typedef enum { MMX_FAMILY_F = 0, MMX_FAMILY_S = 1 } mmx_family;

/* F: -lambda x^2/2 + mu x y + s rho |y|^{k+1}/(k+1)!, S: the sigmoid instance.
 * Y = [a, a + D]; has_a = 0 picks -D/2 (F) or 0 (S). x_half_width <= 0 keeps the default X. */
typedef struct {
  int family;
  int k;
  int s;
  double lambda, mu, rho, D;
  int has_a;
  double a;
  double x_half_width;
} mmx_hard_spec;

typedef struct {
  int dim_x, dim_y;
  double lambda, mu, rho;
  int s;
  double radius, x_half_width, b_scale;
  uint64_t seed;
} mmx_cubic_ball_params;

MMX_API void mmx_hard_spec_init(mmx_hard_spec* spec);
MMX_API void mmx_cubic_ball_params_init(mmx_cubic_ball_params* params);

MMX_API mmx_status mmx_problem_hard(const mmx_hard_spec* spec, mmx_problem** out);
MMX_API mmx_status mmx_problem_cubic_ball(const mmx_cubic_ball_params* params, mmx_problem** out);
MMX_API mmx_status mmx_problem_intro(int bounded_x, mmx_problem** out);
MMX_API void mmx_problem_destroy(mmx_problem* p);

MMX_API int mmx_problem_dim_x(const mmx_problem* p);
MMX_API int mmx_problem_dim_y(const mmx_problem* p);
MMX_API mmx_status mmx_problem_value(const mmx_problem* p, const double* x, const double* y, double* out);
MMX_API mmx_status mmx_problem_grad_x(const mmx_problem* p, const double* x, const double* y, double* out);
MMX_API mmx_status mmx_problem_grad_y(const mmx_problem* p, const double* x, const double* y, double* out);
/* max_y f(x, y); argmax may be NULL. */
MMX_API mmx_status mmx_problem_primal(const mmx_problem* p, const double* x, double* value, double* argmax);

/* ---- solvers ---- */

typedef struct {
  int algorithm;        /* 1, 2 or 3 */
  double epsilon;
  const double* x0;     /* NULL: projection of 0 onto X */
  const double* y_hat;  /* NULL: center of Y */
  int coupled;          /* -1 automatic, 0, 1 (algorithm 2) */
  int naive;            /* algorithm 3 */
  double p_fail, q_fail;
  long long T_override; /* <= 0: iteration count from the guarantee */
  long long T_cap;
  uint64_t seed;
} mmx_solver_config;

typedef struct {
  long long value, grad_x, grad_y, cross_jvp, cross3_jvp, hvp, linear_max, max_oracle;
} mmx_oracle_counters;

MMX_API void mmx_solver_config_init(mmx_solver_config* cfg);
MMX_API mmx_status mmx_solve(const mmx_problem* p, const mmx_solver_config* cfg, mmx_run** out);
MMX_API void mmx_run_destroy(mmx_run* r);
MMX_API long long mmx_run_iterations(const mmx_run* r);
MMX_API double mmx_run_eps_star(const mmx_run* r);
MMX_API double mmx_run_lambda_bar(const mmx_run* r);
MMX_API double mmx_run_gamma_x(const mmx_run* r);
/* The returned point (best iterate, or the sampled one for algorithm 3). */
MMX_API mmx_status mmx_run_point(const mmx_run* r, double* x_out);
/* Copies min(cap, T) residuals eps_t; *n receives T. */
MMX_API mmx_status mmx_run_trace_eps(const mmx_run* r, double* out, long long cap, long long* n);
MMX_API mmx_status mmx_run_counters(const mmx_run* r, mmx_oracle_counters* out);
/* CSV trace (t, eps_t, phi_hat, oracle_calls). *needed gets the size including the NUL. */
MMX_API mmx_status mmx_run_trace_csv(const mmx_run* r, char* buf, size_t cap, size_t* needed);

/* ---- stationarity ---- */

/* |grad of the 2 lambda_bar Moreau envelope| at x. order = -1 uses the true
 * primal, 0..2 the Taylor surrogate of that order around y_hat (NULL: center of Y). */
MMX_API mmx_status mmx_moreau_grad_norm(const mmx_problem* p, int order, const double* y_hat, const double* x,
                                        double lambda_bar, double* out);

/* ---- lower-bound certificates ---- */

typedef struct {
  int k;
  double lambda, mu, rho, D;
  int regime; /* -1 automatic, 0 weak coupling, 1 strong coupling */
} mmx_cert_request;

typedef struct {
  char case_name[32];
  int regime;
  double y_hat, x_star;
  double surrogate_moreau_grad, true_moreau_grad, bound;
  int surrogate_stationary, violates;
} mmx_certificate;

MMX_API mmx_status mmx_certify(const mmx_cert_request* req, mmx_certificate* out);

/* ---- diameter condition ---- */

typedef struct {
  double lhs, coupling_term, homogeneous_term, lambda_bar;
  int admissible;
} mmx_diameter_verdict;

MMX_API mmx_status mmx_check_theorem1(const mmx_problem* p, double D, double epsilon, int k, mmx_diameter_verdict* out);
MMX_API mmx_status mmx_theorem1_threshold_D(const mmx_problem* p, double epsilon, int k, double* out);

/* ---- Krylov oracle ---- */

/* Approximate argmax of y'Hy/2 + g'y over |y| <= R. H is d x d row-major. */
MMX_API mmx_status mmx_krylov_approx_max(int d, const double* H, const double* g, double R, double delta,
                                         double rho1, double q_fail, uint64_t seed, double* y_out, double* value);

/* ---- experiments ---- */

typedef struct {
  int has_seed;
  uint64_t seed;
  const char* out_dir; /* NULL: config, then MMX_OUT_DIR, then "out" */
  int jobs;
  int timing;
} mmx_run_options;

MMX_API void mmx_run_options_init(mmx_run_options* opt);
/* command NULL uses the config's own. Config and I/O problems fail here; run
 * failures and assertions are reported by the handle. */
MMX_API mmx_status mmx_experiment_run(const char* config_path, const char* command, const mmx_run_options* opt,
                                      mmx_experiment** out);
MMX_API void mmx_experiment_destroy(mmx_experiment* e);
/* 0 ok, 1 assertion failure, 2 config, 3 budget or numerical. */
MMX_API int mmx_experiment_exit_code(const mmx_experiment* e);
MMX_API const char* mmx_experiment_message(const mmx_experiment* e);
MMX_API int mmx_experiment_file_count(const mmx_experiment* e);
MMX_API const char* mmx_experiment_file(const mmx_experiment* e, int i);
MMX_API long long mmx_experiment_rows(const mmx_experiment* e);

#ifdef __cplusplus
}
#endif

#endif /* MMX_H */
