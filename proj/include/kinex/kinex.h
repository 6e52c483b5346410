#ifndef KINEX_KINEX_H
#define KINEX_KINEX_H

/* C interface to the kinex library. All handles are opaque; every fallible
 * call returns a kinex_status and leaves a thread-local message readable with
 * kinex_last_error(). Class indices are 0-based. Arrays are caller-owned and
 * must hold at least the stated number of doubles. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(KINEX_BUILDING)
#    define KINEX_API __declspec(dllexport)
#  else
#    define KINEX_API __declspec(dllimport)
#  endif
#else
#  define KINEX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kinex_status {
  KINEX_OK = 0,
  KINEX_ERR_INVALID_ARGUMENT = 1,
  KINEX_ERR_DEGENERATE_STATE = 2,
  KINEX_ERR_INTERNAL_CONSISTENCY = 3,
  KINEX_ERR_NON_CONVERGENCE = 4,
  KINEX_ERR_STABILITY = 5,
  KINEX_ERR_CONSERVATION = 6,
  KINEX_ERR_CALIBRATION = 7,
  KINEX_ERR_DIVERGENT_MEAN = 8,
  KINEX_ERR_ACCURACY = 9,
  KINEX_ERR_IO = 10,
  KINEX_ERR_BUFFER_TOO_SMALL = 11,
  KINEX_ERR_NULL_POINTER = 12,
  KINEX_ERR_UNKNOWN = 99
} kinex_status;

KINEX_API const char* kinex_status_name(kinex_status status);
KINEX_API const char* kinex_last_error(void);
KINEX_API const char* kinex_version(void);

/* ---- model ---- */

typedef struct kinex_model_config {
  int n;                  /* number of classes */
  double spacing;         /* r_j = spacing * j */
  double exchange_amount; /* S */
  double tau_min;
  double tau_max;
  double gamma;           /* welfare parameter in (0, 1/2] */
} kinex_model_config;

KINEX_API void kinex_model_config_default(kinex_model_config* config);

typedef struct kinex_model kinex_model;

KINEX_API kinex_status kinex_model_create(const kinex_model_config* config, kinex_model** out);
KINEX_API void kinex_model_destroy(kinex_model* model);

KINEX_API size_t kinex_model_size(const kinex_model* model);
/* 16 hex digits plus terminator; buffer of at least 17 chars. */
KINEX_API kinex_status kinex_model_hash(const kinex_model* model, char* buffer, size_t len);

typedef enum kinex_model_array {
  KINEX_ARRAY_BOUNDARIES = 0, /* n + 1 */
  KINEX_ARRAY_AVERAGES = 1,   /* n */
  KINEX_ARRAY_TAX_RATES = 2,  /* n */
  KINEX_ARRAY_WEIGHTS = 3,    /* n */
  KINEX_ARRAY_ENCOUNTER = 4,  /* n * n, p[h][k] row-major */
  KINEX_ARRAY_TRANSITION = 5  /* n^3, C[i][h][k] */
} kinex_model_array;

KINEX_API kinex_status kinex_model_array_get(const kinex_model* model, kinex_model_array which, double* out,
                                             size_t len);

/* x on the simplex (length n); out gets dX/dt (length n). */
KINEX_API kinex_status kinex_model_rhs(const kinex_model* model, const double* x, size_t n, double* out);
KINEX_API kinex_status kinex_model_indirect_variation(const kinex_model* model, const double* x, size_t n,
                                                      size_t h, size_t k, size_t i, double* out);
KINEX_API kinex_status kinex_model_check_state(const kinex_model* model, const double* x, size_t n);

typedef enum kinex_model_file {
  KINEX_FILE_ENCOUNTER = 0,
  KINEX_FILE_TRANSITION = 1,
  KINEX_FILE_SCHEDULE = 2,
  KINEX_FILE_RECORD = 3
} kinex_model_file;

KINEX_API kinex_status kinex_model_write(const kinex_model* model, kinex_model_file which, const char* path);

/* ---- dynamics ---- */

typedef struct kinex_integration_settings {
  double dt;
  double max_time;
  double convergence_tol;
  double drift_tol;
  int renormalize;
} kinex_integration_settings;

KINEX_API void kinex_integration_settings_default(kinex_integration_settings* settings);

typedef enum kinex_initial_kind {
  KINEX_IC_UNIFORM = 0,
  KINEX_IC_LOW_MIDDLE = 1,
  KINEX_IC_TWO_POINT = 2,
  KINEX_IC_EXPLICIT = 3
} kinex_initial_kind;

typedef struct kinex_initial_spec {
  kinex_initial_kind kind;
  size_t class_a;
  size_t class_b;
  double decay;
  const double* values; /* KINEX_IC_EXPLICIT */
  size_t values_len;
  int has_target_mu;
  double target_mu;
} kinex_initial_spec;

KINEX_API void kinex_initial_spec_default(kinex_initial_spec* spec);
KINEX_API kinex_status kinex_initial_condition(const kinex_model* model, const kinex_initial_spec* spec, double* out,
                                               size_t len);

typedef struct kinex_equilibrium kinex_equilibrium;

typedef struct kinex_equilibrium_info {
  double mu;
  double residual;
  double step_difference;
  double elapsed_time;
  double rate_estimate;
  double rate_fit_r2;
  size_t steps;
  double max_sum_drift;
  double max_mu_drift;
  int converged;
} kinex_equilibrium_info;

typedef void (*kinex_trajectory_callback)(double time, const double* x, size_t n, double mu, double residual,
                                          void* user);

/* On KINEX_ERR_NON_CONVERGENCE *out still receives a handle holding the last
 * state (converged = 0); the caller owns it either way. trajectory_csv may be
 * NULL; callback may be NULL. */
KINEX_API kinex_status kinex_integrate(const kinex_model* model, const double* x0, size_t n,
                                       const kinex_integration_settings* settings, size_t stride,
                                       kinex_trajectory_callback callback, void* user,
                                       const char* trajectory_csv, kinex_equilibrium** out);
KINEX_API kinex_status kinex_solve_equilibrium(const kinex_model* model, double mu,
                                               const kinex_integration_settings* settings,
                                               kinex_equilibrium** out);
KINEX_API void kinex_equilibrium_destroy(kinex_equilibrium* eq);
KINEX_API kinex_status kinex_equilibrium_info_get(const kinex_equilibrium* eq, kinex_equilibrium_info* info);
KINEX_API kinex_status kinex_equilibrium_state(const kinex_equilibrium* eq, double* out, size_t len);
KINEX_API kinex_status kinex_equilibrium_write(const kinex_model* model, const kinex_equilibrium* eq,
                                               const char* path);

/* ---- indicators ---- */

typedef struct kinex_indicators {
  double mu;
  double gini;
  double tax_revenue;
  double mobility;
  double exchange_collective;
  double welfare_collective;
} kinex_indicators;

KINEX_API kinex_status kinex_indicators_eval(const kinex_model* model, const double* x, size_t n,
                                             kinex_indicators* out);

typedef enum kinex_mobility_column {
  KINEX_MOB_EXCHANGE_INDIVIDUAL = 0,
  KINEX_MOB_WELFARE_INDIVIDUAL = 1,
  KINEX_MOB_INDIVIDUAL = 2,
  KINEX_MOB_EXCHANGE_CLASS = 3,
  KINEX_MOB_WELFARE_CLASS = 4,
  KINEX_MOB_CLASS = 5
} kinex_mobility_column;

/* Interior classes 1..n-2; out holds n - 2 values. */
KINEX_API kinex_status kinex_mobility_profile(const kinex_model* model, const double* x, size_t n,
                                              kinex_mobility_column which, double* out, size_t len);

typedef enum kinex_indicator_file {
  KINEX_FILE_INDICATORS = 0,
  KINEX_FILE_INDICATOR_RECORD = 1,
  KINEX_FILE_LORENZ = 2,
  KINEX_FILE_MOBILITY = 3
} kinex_indicator_file;

KINEX_API kinex_status kinex_indicators_write(const kinex_model* model, const double* x, size_t n,
                                              kinex_indicator_file which, const char* path);

typedef struct kinex_delta_summary {
  double gini;     /* G_b - G_a */
  double mobility; /* M_b - M_a */
} kinex_delta_summary;

/* Both models must share the income grid. delta_csv may be NULL. */
KINEX_API kinex_status kinex_mobility_delta(const kinex_model* model_a, const double* x_a,
                                            const kinex_model* model_b, const double* x_b, size_t n,
                                            const char* delta_csv, kinex_delta_summary* out);

/* ---- calibration, sweeps, level lines ---- */

typedef struct kinex_calibration {
  double tau_min;
  double tau_max;
  double gamma;
  double target_gini;
  double mu_lo;
  double mu_hi;
  double gini_tol;
  double mu_tol;
  int max_iterations;
} kinex_calibration;

typedef struct kinex_calibration_result {
  double mu;
  double gini;
  int iterations;
  double gini_at_lo; /* filled on KINEX_ERR_CALIBRATION */
  double gini_at_hi;
} kinex_calibration_result;

KINEX_API void kinex_calibration_default(kinex_calibration* calibration);
KINEX_API kinex_status kinex_calibrate_mu(const kinex_model_config* base, const kinex_calibration* calibration,
                                          const kinex_integration_settings* settings,
                                          kinex_calibration_result* out);

typedef struct kinex_sweep kinex_sweep;

typedef struct kinex_sweep_cell {
  double tau_min;
  double tau_max;
  double delta_tau;
  double gamma;
  double mu;
  double gini;
  double mobility;
  double tax_revenue;
  double residual;
  int converged;
} kinex_sweep_cell;

typedef struct kinex_correlation {
  size_t cells;
  double pearson;
  int degenerate;
  int increments_opposite;
  size_t sign_checks;
  double max_product; /* largest (dG * dM) over adjacent pairs */
} kinex_correlation;

/* threads = 0 uses the hardware concurrency. */
KINEX_API kinex_status kinex_sweep_run(const kinex_model_config* base, const double* delta_taus, size_t n_delta,
                                       const double* gammas, size_t n_gamma, double mu, double rate_center,
                                       const kinex_integration_settings* settings, unsigned threads,
                                       kinex_sweep** out);
KINEX_API void kinex_sweep_destroy(kinex_sweep* sweep);
KINEX_API size_t kinex_sweep_size(const kinex_sweep* sweep);
KINEX_API kinex_status kinex_sweep_cell_get(const kinex_sweep* sweep, size_t index, kinex_sweep_cell* out);
/* Empty string for converged cells; NULL for a bad index. */
KINEX_API const char* kinex_sweep_cell_failure(const kinex_sweep* sweep, size_t index);
KINEX_API kinex_status kinex_sweep_correlation(const kinex_sweep* sweep, kinex_correlation* out);
KINEX_API kinex_status kinex_sweep_write_csv(const kinex_sweep* sweep, const char* path);

typedef struct kinex_levelline_options {
  double gamma_lo;
  double gamma_hi;
  double tolerance;
  int max_iterations;
  double rate_center;
  unsigned threads;
} kinex_levelline_options;

typedef struct kinex_level_point {
  double delta_tau;
  double tau_min;
  double tau_max;
  double gamma;
  double gini;
  double mobility;
} kinex_level_point;

typedef struct kinex_levelline kinex_levelline;

KINEX_API void kinex_levelline_options_default(kinex_levelline_options* options);
KINEX_API kinex_status kinex_levelline_trace(const kinex_model_config* base, double target_gini,
                                             const double* delta_taus, size_t n_delta, double mu,
                                             const kinex_integration_settings* settings,
                                             const kinex_levelline_options* options, kinex_levelline** out);
KINEX_API void kinex_levelline_destroy(kinex_levelline* line);
KINEX_API size_t kinex_levelline_size(const kinex_levelline* line);
KINEX_API kinex_status kinex_levelline_point_get(const kinex_levelline* line, size_t index, kinex_level_point* out);
KINEX_API size_t kinex_levelline_warning_count(const kinex_levelline* line);
KINEX_API const char* kinex_levelline_warning(const kinex_levelline* line, size_t index);
KINEX_API kinex_status kinex_levelline_write_csv(const kinex_levelline* line, const char* path);
KINEX_API kinex_status kinex_levelline_write_table(const kinex_levelline* line, const char* label,
                                                   const char* path);

/* ---- kappa-generalized distribution ---- */

typedef struct kinex_quadrature {
  double abs_tol;
  unsigned max_depth;
  double tail_margin;
} kinex_quadrature;

KINEX_API void kinex_quadrature_default(kinex_quadrature* quadrature);
KINEX_API kinex_status kinex_kappa_exp(double u, double kappa, double* out);
KINEX_API kinex_status kinex_kappa_log(double y, double kappa, double* out);
KINEX_API kinex_status kinex_kappa_quantile(double p, double alpha, double kappa, double beta, double* out);
/* quadrature may be NULL for defaults. */
KINEX_API kinex_status kinex_kappa_gini(double alpha, double kappa, const kinex_quadrature* quadrature,
                                        double* out);
KINEX_API kinex_status kinex_kappa_from_temperature(double rest_energy_ratio, double* out);

typedef struct kinex_kappa_table kinex_kappa_table;

typedef struct kinex_kappa_row {
  double alpha;
  double kappa;
  double gini; /* NaN when flagged */
  int flagged;
} kinex_kappa_row;

KINEX_API kinex_status kinex_kappa_table_run(const double* alphas, size_t n_alpha, const double* kappas,
                                             size_t n_kappa, const kinex_quadrature* quadrature, unsigned threads,
                                             kinex_kappa_table** out);
KINEX_API void kinex_kappa_table_destroy(kinex_kappa_table* table);
KINEX_API size_t kinex_kappa_table_size(const kinex_kappa_table* table);
KINEX_API kinex_status kinex_kappa_table_row_get(const kinex_kappa_table* table, size_t index, kinex_kappa_row* out);
KINEX_API const char* kinex_kappa_table_note(const kinex_kappa_table* table, size_t index);
KINEX_API kinex_status kinex_kappa_table_write_csv(const kinex_kappa_table* table, const char* path);

#ifdef __cplusplus
}
#endif

#endif
