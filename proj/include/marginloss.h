/*
 * marginloss C API
 *
 * A flat, extern "C" surface over the margin-loss library: symmetric CDFs,
 * even weight functions, conformable losses, SLRR identities, empirical risk
 * minimization, AdaBoost, and seeded data generation. Objects are opaque
 * handles created and destroyed through the API; every fallible call returns
 * an mgl_status and writes results through out-parameters. A human-readable
 * message for the most recent failure on the calling thread is available via
 * mgl_last_error().
 */
#ifndef MARGINLOSS_H
#define MARGINLOSS_H

#include <stddef.h>

#if defined(_WIN32)
#define MGL_API __declspec(dllexport)
#else
#define MGL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mgl_status {
  MGL_OK = 0,
  MGL_ERR_INVALID = 1,     /* bad argument or validation failure */
  MGL_ERR_DOMAIN = 2,      /* evaluation outside a function's domain */
  MGL_ERR_UNSUPPORTED = 3, /* missing capability (e.g. no log-derivative) */
  MGL_ERR_RUNTIME = 4,     /* numerical failure (quadrature, non-finite risk) */
  MGL_ERR_IO = 5           /* file read/write failure */
} mgl_status;

typedef struct mgl_dist mgl_dist;
typedef struct mgl_weight mgl_weight;
typedef struct mgl_loss mgl_loss;
typedef struct mgl_dataset mgl_dataset;
typedef struct mgl_fit_result mgl_fit_result;
typedef struct mgl_boost_model mgl_boost_model;

MGL_API const char* mgl_version(void);
/* Message for the last failing call on this thread; empty if none. */
MGL_API const char* mgl_last_error(void);

/* ---- symmetric CDFs -------------------------------------------------- */

/* name: "logistic", "uniform", "gaussian" */
MGL_API mgl_status mgl_dist_create(const char* name, mgl_dist** out);
MGL_API void mgl_dist_free(mgl_dist* dist);
MGL_API mgl_status mgl_dist_cdf(const mgl_dist* dist, double w, double* out);
MGL_API mgl_status mgl_dist_density(const mgl_dist* dist, double w, double* out);
MGL_API mgl_status mgl_dist_odds(const mgl_dist* dist, double w, double* out);

/* ---- weight functions ------------------------------------------------ */

/* spec: "constant:<c>", "likelihood", "savage", "gauss:<m>", "laplace:<m>",
 * "buzas2009[:<m>]" */
MGL_API mgl_status mgl_weight_create(const char* spec, mgl_weight** out);
MGL_API void mgl_weight_free(mgl_weight* weight);
MGL_API mgl_status mgl_weight_eval(const mgl_weight* weight, const mgl_dist* dist,
                                   double w, double* out);
MGL_API mgl_status mgl_weight_log_derivative(const mgl_weight* weight,
                                             const mgl_dist* dist, double w,
                                             double* out);
MGL_API mgl_status mgl_weight_check_even(const mgl_weight* weight, const mgl_dist* dist,
                                         const double* grid, size_t n_grid, int* even,
                                         double* max_asymmetry);

/* ---- conformable losses ---------------------------------------------- */

MGL_API mgl_status mgl_loss_create(const mgl_dist* dist, const mgl_weight* weight,
                                   double k, mgl_loss** out);
/* name: "exponential", "logistic", "savage", "gaussian[:m]", "laplace[:m]",
 * "squared", "exp-unit" */
MGL_API mgl_status mgl_loss_create_named(const char* name, mgl_loss** out);
MGL_API void mgl_loss_free(mgl_loss* loss);
MGL_API mgl_status mgl_loss_eval(const mgl_loss* loss, double v, double* out);
MGL_API mgl_status mgl_loss_derivative(const mgl_loss* loss, double v, double* out);
MGL_API mgl_status mgl_loss_eval_quadrature(const mgl_loss* loss, double v,
                                            double abs_tol, double* out);
MGL_API double mgl_loss_k(const mgl_loss* loss);
MGL_API const char* mgl_loss_name(const mgl_loss* loss);
MGL_API int mgl_loss_has_closed_form(const mgl_loss* loss);

MGL_API mgl_status mgl_loss_conformability(const mgl_loss* loss, const double* grid,
                                           size_t n_grid, int* pass,
                                           double* max_rel_err, size_t* skipped);
MGL_API mgl_status mgl_loss_convexity(const mgl_loss* loss, const double* grid,
                                      size_t n_grid, int* convex,
                                      double* max_violation);
/* Uses the built-in check grid for the loss's distribution. */
MGL_API mgl_status mgl_loss_check(const mgl_loss* loss, int* conformable, int* convex,
                                  double* max_rel_err, double* max_violation);
/* Fills three caller-allocated arrays of length n_points. */
MGL_API mgl_status mgl_loss_tabulate(const mgl_loss* loss, double v_min, double v_max,
                                     size_t n_points, double* v, double* phi,
                                     double* dphi);

/* ---- standardized logistic regression residuals ---------------------- */

/* s = y* exp(-y* f / 2); -log(s^2) = y* f. */
MGL_API mgl_status mgl_slrr(int y_star, double f, double* s);
MGL_API mgl_status mgl_margin_from_residual(double s, double* margin);

/* ---- datasets --------------------------------------------------------- */

MGL_API mgl_status mgl_dataset_create(const double* x /* row-major n*p */,
                                      const int* y /* +/-1 */, size_t n, size_t p,
                                      mgl_dataset** out);
MGL_API mgl_status mgl_dataset_read_csv(const char* path, mgl_dataset** out);
MGL_API mgl_status mgl_dataset_write_csv(const mgl_dataset* data, const char* path,
                                         const char* comment /* nullable */);
/* config_json follows the simulate schema; see mgl_dataset_generate docs in
 * the README. */
MGL_API mgl_status mgl_dataset_generate(const char* config_json, mgl_dataset** out);
MGL_API void mgl_dataset_free(mgl_dataset* data);
MGL_API size_t mgl_dataset_rows(const mgl_dataset* data);
MGL_API size_t mgl_dataset_cols(const mgl_dataset* data);
MGL_API mgl_status mgl_dataset_row(const mgl_dataset* data, size_t i,
                                   double* x /* p values */, int* y);

/* ---- empirical risk minimization -------------------------------------- */

typedef struct mgl_fit_options {
  double tolerance;          /* gradient inf-norm target, default 1e-8 */
  size_t max_iterations;     /* default 20000 */
  size_t restarts;           /* total starts, first at beta = 0; default 1 */
  unsigned long long seed;   /* seeds the restart draws */
  int intercept;             /* nonzero prepends an intercept column */
  int threads;               /* data-parallel reduction width, default 1 */
} mgl_fit_options;

MGL_API void mgl_fit_options_init(mgl_fit_options* options);

MGL_API mgl_status mgl_fit(const mgl_loss* loss, const mgl_dataset* data,
                           const mgl_fit_options* options, mgl_fit_result** out);
/* Minimizes sum_i |S_i|^p = sum_i exp(-y_i f_i p/2). */
MGL_API mgl_status mgl_pnorm_fit(const mgl_dataset* data, double p,
                                 const mgl_fit_options* options, mgl_fit_result** out);

MGL_API void mgl_fit_result_free(mgl_fit_result* result);
MGL_API size_t mgl_fit_result_dim(const mgl_fit_result* result);
MGL_API mgl_status mgl_fit_result_beta(const mgl_fit_result* result, double* out,
                                       size_t dim);
/* "converged", "max_iterations", "diverged_separable" */
MGL_API const char* mgl_fit_result_status(const mgl_fit_result* result);
MGL_API size_t mgl_fit_result_iterations(const mgl_fit_result* result);
MGL_API double mgl_fit_result_final_risk(const mgl_fit_result* result);
MGL_API double mgl_fit_result_gradient_norm(const mgl_fit_result* result);
/* R_Emp = (1/n) sum exp(-y_i f_i) on the training data. */
MGL_API double mgl_fit_result_exp_risk(const mgl_fit_result* result);

/* f(x; beta) for a linear model (intercept first when present). */
MGL_API mgl_status mgl_linear_predict(const double* beta, size_t dim, int intercept,
                                      const double* x, size_t p, double* f);
/* Logistic confidence F(f). */
MGL_API double mgl_soft_probability(double f);
/* G-scale probability, saturating at bounded support edges. */
MGL_API mgl_status mgl_g_probability(const mgl_dist* dist, double f, double* out);
MGL_API mgl_status mgl_exp_empirical_risk(const mgl_dataset* data, const double* beta,
                                          size_t dim, int intercept, double* out);

/* ---- AdaBoost ---------------------------------------------------------- */

typedef struct mgl_boost_options {
  size_t stages;
  double r_emp_stop;        /* early stop when R_Emp <= value; < 0 disables */
  unsigned long long seed;
} mgl_boost_options;

MGL_API void mgl_boost_options_init(mgl_boost_options* options);

MGL_API mgl_status mgl_boost_train(const mgl_dataset* data,
                                   const mgl_boost_options* options,
                                   mgl_boost_model** out);
MGL_API void mgl_boost_model_free(mgl_boost_model* model);
MGL_API size_t mgl_boost_stages(const mgl_boost_model* model);
MGL_API mgl_status mgl_boost_stage(const mgl_boost_model* model, size_t m,
                                   double* theta, size_t* feature_index,
                                   double* threshold, int* polarity);
/* out has stages+1 entries; index 0 is the empty model (exactly 1). */
MGL_API mgl_status mgl_boost_staged_r_emp(const mgl_boost_model* model, double* out,
                                          size_t len);
/* "completed", "r_emp_stop", "perfect_stump", "no_improving_stump" */
MGL_API const char* mgl_boost_status(const mgl_boost_model* model);
MGL_API mgl_status mgl_boost_predict(const mgl_boost_model* model, const double* x,
                                     size_t p, double* f);
/* Fills (stages+1) rows x 4 columns row-major:
 * stage, train_risk (mean e^{-v/2}), r_emp (mean e^{-v}), misclassification. */
MGL_API mgl_status mgl_boost_diagnostics(const mgl_boost_model* model,
                                         const mgl_dataset* data, double* out,
                                         size_t rows);

#ifdef __cplusplus
}
#endif

#endif /* MARGINLOSS_H */
