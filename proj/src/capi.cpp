#include "marginloss.h"

#include <cstring>
#include <string>

#include "marginloss/boosting.hpp"
#include "marginloss/datagen.hpp"
#include "marginloss/dataset.hpp"
#include "marginloss/errors.hpp"
#include "marginloss/estimator.hpp"
#include "marginloss/loss.hpp"
#include "marginloss/residuals.hpp"

using namespace marginloss;

namespace {

thread_local std::string g_last_error;

mgl_status fail(mgl_status code, const char* what) {
  g_last_error = what;
  return code;
}

/// Runs fn, translating exceptions to status codes.
template <typename Fn>
mgl_status guarded(Fn&& fn) {
  try {
    fn();
    return MGL_OK;
  } catch (const std::domain_error& e) {
    return fail(MGL_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(MGL_ERR_INVALID, e.what());
  } catch (const UnsupportedError& e) {
    return fail(MGL_ERR_UNSUPPORTED, e.what());
  } catch (const IoError& e) {
    return fail(MGL_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(MGL_ERR_RUNTIME, e.what());
  }
}

mgl_status require(bool ok, const char* what) {
  return ok ? MGL_OK : fail(MGL_ERR_INVALID, what);
}

}  // namespace

struct mgl_dist {
  SymmetricCdf value;
};
struct mgl_weight {
  WeightFn value;
};
struct mgl_loss {
  ConformableLoss value;
};
struct mgl_dataset {
  Dataset value;
};
struct mgl_fit_result {
  FitResult value;
  double exp_risk = 0.0;
};
struct mgl_boost_model {
  BoostTraining value;
};

extern "C" {

const char* mgl_version(void) { return "1.0.0"; }

const char* mgl_last_error(void) { return g_last_error.c_str(); }

/* ---- distributions ---- */

mgl_status mgl_dist_create(const char* name, mgl_dist** out) {
  if (require(name && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = new mgl_dist{SymmetricCdf::parse(name)}; });
}

void mgl_dist_free(mgl_dist* dist) { delete dist; }

mgl_status mgl_dist_cdf(const mgl_dist* dist, double w, double* out) {
  if (require(dist && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = dist->value.cdf(w); });
}

mgl_status mgl_dist_density(const mgl_dist* dist, double w, double* out) {
  if (require(dist && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = dist->value.density(w); });
}

mgl_status mgl_dist_odds(const mgl_dist* dist, double w, double* out) {
  if (require(dist && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = dist->value.odds(w); });
}

/* ---- weights ---- */

mgl_status mgl_weight_create(const char* spec, mgl_weight** out) {
  if (require(spec && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = new mgl_weight{WeightFn::parse(spec)}; });
}

void mgl_weight_free(mgl_weight* weight) { delete weight; }

mgl_status mgl_weight_eval(const mgl_weight* weight, const mgl_dist* dist, double w,
                           double* out) {
  if (require(weight && dist && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = weight->value(dist->value, w); });
}

mgl_status mgl_weight_log_derivative(const mgl_weight* weight, const mgl_dist* dist,
                                     double w, double* out) {
  if (require(weight && dist && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = weight->value.log_derivative(dist->value, w); });
}

mgl_status mgl_weight_check_even(const mgl_weight* weight, const mgl_dist* dist,
                                 const double* grid, size_t n_grid, int* even,
                                 double* max_asymmetry) {
  if (require(weight && dist && grid && even, "null argument") != MGL_OK)
    return MGL_ERR_INVALID;
  return guarded([&] {
    const auto report = weight->value.check_even(dist->value, {grid, n_grid});
    *even = report.even ? 1 : 0;
    if (max_asymmetry) *max_asymmetry = report.max_asymmetry;
  });
}

/* ---- losses ---- */

mgl_status mgl_loss_create(const mgl_dist* dist, const mgl_weight* weight, double k,
                           mgl_loss** out) {
  if (require(dist && weight && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = new mgl_loss{make_loss(dist->value, weight->value, k)}; });
}

mgl_status mgl_loss_create_named(const char* name, mgl_loss** out) {
  if (require(name && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = new mgl_loss{named_loss(name)}; });
}

void mgl_loss_free(mgl_loss* loss) { delete loss; }

mgl_status mgl_loss_eval(const mgl_loss* loss, double v, double* out) {
  if (require(loss && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = loss->value.eval(v); });
}

mgl_status mgl_loss_derivative(const mgl_loss* loss, double v, double* out) {
  if (require(loss && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = loss->value.derivative(v); });
}

mgl_status mgl_loss_eval_quadrature(const mgl_loss* loss, double v, double abs_tol,
                                    double* out) {
  if (require(loss && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = loss->value.eval_quadrature(v, abs_tol); });
}

double mgl_loss_k(const mgl_loss* loss) { return loss ? loss->value.k() : 0.0; }

const char* mgl_loss_name(const mgl_loss* loss) {
  return loss ? loss->value.name().c_str() : "";
}

int mgl_loss_has_closed_form(const mgl_loss* loss) {
  return loss && loss->value.has_closed_form() ? 1 : 0;
}

mgl_status mgl_loss_conformability(const mgl_loss* loss, const double* grid,
                                   size_t n_grid, int* pass, double* max_rel_err,
                                   size_t* skipped) {
  if (require(loss && grid && pass, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] {
    const auto report = conformability_check(loss->value, {grid, n_grid});
    *pass = report.pass ? 1 : 0;
    if (max_rel_err) *max_rel_err = report.max_rel_err;
    if (skipped) *skipped = report.skipped;
  });
}

mgl_status mgl_loss_convexity(const mgl_loss* loss, const double* grid, size_t n_grid,
                              int* convex, double* max_violation) {
  if (require(loss && grid && convex, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] {
    const auto report = convexity_check(loss->value, {grid, n_grid});
    *convex = report.convex ? 1 : 0;
    if (max_violation) *max_violation = report.max_violation;
  });
}

mgl_status mgl_loss_check(const mgl_loss* loss, int* conformable, int* convex,
                          double* max_rel_err, double* max_violation) {
  if (require(loss && conformable && convex, "null argument") != MGL_OK)
    return MGL_ERR_INVALID;
  return guarded([&] {
    const auto grid = default_check_grid(loss->value.dist());
    const auto conf = conformability_check(loss->value, grid);
    const auto conv = convexity_check(loss->value, grid);
    *conformable = conf.pass ? 1 : 0;
    *convex = conv.convex ? 1 : 0;
    if (max_rel_err) *max_rel_err = conf.max_rel_err;
    if (max_violation) *max_violation = conv.max_violation;
  });
}

mgl_status mgl_loss_tabulate(const mgl_loss* loss, double v_min, double v_max,
                             size_t n_points, double* v, double* phi, double* dphi) {
  if (require(loss && v && phi && dphi, "null argument") != MGL_OK)
    return MGL_ERR_INVALID;
  return guarded([&] {
    const auto table = tabulate(loss->value, v_min, v_max, n_points);
    std::memcpy(v, table.grid.data(), n_points * sizeof(double));
    std::memcpy(phi, table.values.data(), n_points * sizeof(double));
    std::memcpy(dphi, table.derivatives.data(), n_points * sizeof(double));
  });
}

/* ---- residuals ---- */

mgl_status mgl_slrr(int y_star, double f, double* s) {
  if (require(s != nullptr, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *s = slrr(y_star, f).s; });
}

mgl_status mgl_margin_from_residual(double s, double* margin) {
  if (require(margin != nullptr, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *margin = slrr_from_residual(s).margin; });
}

/* ---- datasets ---- */

mgl_status mgl_dataset_create(const double* x, const int* y, size_t n, size_t p,
                              mgl_dataset** out) {
  if (require(x && y && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] {
    *out = new mgl_dataset{Dataset(std::vector<double>(x, x + n * p),
                                   std::vector<int>(y, y + n), p)};
  });
}

mgl_status mgl_dataset_read_csv(const char* path, mgl_dataset** out) {
  if (require(path && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = new mgl_dataset{Dataset::read_csv(path)}; });
}

mgl_status mgl_dataset_write_csv(const mgl_dataset* data, const char* path,
                                 const char* comment) {
  if (require(data && path, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { data->value.write_csv(path, comment ? comment : ""); });
}

mgl_status mgl_dataset_generate(const char* config_json, mgl_dataset** out) {
  if (require(config_json && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded(
      [&] { *out = new mgl_dataset{generate(GenConfig::from_json(config_json))}; });
}

void mgl_dataset_free(mgl_dataset* data) { delete data; }

size_t mgl_dataset_rows(const mgl_dataset* data) { return data ? data->value.rows() : 0; }

size_t mgl_dataset_cols(const mgl_dataset* data) { return data ? data->value.cols() : 0; }

mgl_status mgl_dataset_row(const mgl_dataset* data, size_t i, double* x, int* y) {
  if (require(data && x && y, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  if (i >= data->value.rows()) return fail(MGL_ERR_INVALID, "row index out of range");
  const auto row = data->value.row(i);
  std::memcpy(x, row.data(), row.size() * sizeof(double));
  *y = data->value.label(i);
  return MGL_OK;
}

/* ---- fitting ---- */

void mgl_fit_options_init(mgl_fit_options* options) {
  if (!options) return;
  options->tolerance = 1e-8;
  options->max_iterations = 20000;
  options->restarts = 1;
  options->seed = 0;
  options->intercept = 0;
  options->threads = 1;
}

namespace {
FitOptions to_core(const mgl_fit_options* options) {
  FitOptions core;
  if (options) {
    core.tolerance = options->tolerance;
    core.max_iterations = options->max_iterations;
    core.restarts = options->restarts;
    core.seed = options->seed;
    core.threads = options->threads;
  }
  return core;
}
}  // namespace

mgl_status mgl_fit(const mgl_loss* loss, const mgl_dataset* data,
                   const mgl_fit_options* options, mgl_fit_result** out) {
  if (require(loss && data && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] {
    const auto spec =
        ModelSpec::linear(data->value.cols(), options && options->intercept);
    auto result = fit(loss->value, spec, data->value, to_core(options));
    const double exp_risk = exp_empirical_risk(spec, result.beta, data->value);
    *out = new mgl_fit_result{std::move(result), exp_risk};
  });
}

mgl_status mgl_pnorm_fit(const mgl_dataset* data, double p,
                         const mgl_fit_options* options, mgl_fit_result** out) {
  if (require(data && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] {
    const auto spec =
        ModelSpec::linear(data->value.cols(), options && options->intercept);
    auto result = pnorm_fit(spec, data->value, p, to_core(options));
    const double exp_risk = exp_empirical_risk(spec, result.beta, data->value);
    *out = new mgl_fit_result{std::move(result), exp_risk};
  });
}

void mgl_fit_result_free(mgl_fit_result* result) { delete result; }

size_t mgl_fit_result_dim(const mgl_fit_result* result) {
  return result ? result->value.beta.size() : 0;
}

mgl_status mgl_fit_result_beta(const mgl_fit_result* result, double* out, size_t dim) {
  if (require(result && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  if (dim != result->value.beta.size())
    return fail(MGL_ERR_INVALID, "beta buffer has wrong dimension");
  std::memcpy(out, result->value.beta.data(), dim * sizeof(double));
  return MGL_OK;
}

const char* mgl_fit_result_status(const mgl_fit_result* result) {
  static thread_local std::string name;
  if (!result) return "";
  name = fit_status_name(result->value.status);
  return name.c_str();
}

size_t mgl_fit_result_iterations(const mgl_fit_result* result) {
  return result ? result->value.iterations : 0;
}

double mgl_fit_result_final_risk(const mgl_fit_result* result) {
  return result ? result->value.final_risk : 0.0;
}

double mgl_fit_result_gradient_norm(const mgl_fit_result* result) {
  return result ? result->value.gradient_norm : 0.0;
}

double mgl_fit_result_exp_risk(const mgl_fit_result* result) {
  return result ? result->exp_risk : 0.0;
}

mgl_status mgl_linear_predict(const double* beta, size_t dim, int intercept,
                              const double* x, size_t p, double* f) {
  if (require(beta && x && f, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] {
    const auto spec = ModelSpec::linear(p, intercept != 0);
    *f = predict(spec, {beta, dim}, {x, p});
  });
}

double mgl_soft_probability(double f) { return SymmetricCdf::logistic().cdf(f); }

mgl_status mgl_g_probability(const mgl_dist* dist, double f, double* out) {
  if (require(dist && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *out = g_probability(dist->value, f); });
}

mgl_status mgl_exp_empirical_risk(const mgl_dataset* data, const double* beta,
                                  size_t dim, int intercept, double* out) {
  if (require(data && beta && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] {
    const auto spec = ModelSpec::linear(data->value.cols(), intercept != 0);
    *out = exp_empirical_risk(spec, {beta, dim}, data->value);
  });
}

/* ---- boosting ---- */

void mgl_boost_options_init(mgl_boost_options* options) {
  if (!options) return;
  options->stages = 50;
  options->r_emp_stop = -1.0;
  options->seed = 0;
}

mgl_status mgl_boost_train(const mgl_dataset* data, const mgl_boost_options* options,
                           mgl_boost_model** out) {
  if (require(data && options && out, "null argument") != MGL_OK)
    return MGL_ERR_INVALID;
  return guarded([&] {
    BoostOptions core;
    core.n_stages = options->stages;
    if (options->r_emp_stop >= 0.0) core.r_emp_stop = options->r_emp_stop;
    core.seed = options->seed;
    *out = new mgl_boost_model{train_adaboost(data->value, core)};
  });
}

void mgl_boost_model_free(mgl_boost_model* model) { delete model; }

size_t mgl_boost_stages(const mgl_boost_model* model) {
  return model ? model->value.model.stages.size() : 0;
}

mgl_status mgl_boost_stage(const mgl_boost_model* model, size_t m, double* theta,
                           size_t* feature_index, double* threshold, int* polarity) {
  if (require(model != nullptr, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  if (m >= model->value.model.stages.size())
    return fail(MGL_ERR_INVALID, "stage index out of range");
  const auto& stage = model->value.model.stages[m];
  if (theta) *theta = stage.theta;
  if (feature_index) *feature_index = stage.stump.feature_index;
  if (threshold) *threshold = stage.stump.threshold;
  if (polarity) *polarity = stage.stump.polarity;
  return MGL_OK;
}

mgl_status mgl_boost_staged_r_emp(const mgl_boost_model* model, double* out,
                                  size_t len) {
  if (require(model && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  if (len != model->value.model.staged_r_emp.size())
    return fail(MGL_ERR_INVALID, "staged r_emp buffer has wrong length");
  std::memcpy(out, model->value.model.staged_r_emp.data(), len * sizeof(double));
  return MGL_OK;
}

const char* mgl_boost_status(const mgl_boost_model* model) {
  static thread_local std::string name;
  if (!model) return "";
  name = boost_status_name(model->value.status);
  return name.c_str();
}

mgl_status mgl_boost_predict(const mgl_boost_model* model, const double* x, size_t p,
                             double* f) {
  if (require(model && x && f, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] { *f = boost_predict(model->value.model, {x, p}); });
}

mgl_status mgl_boost_diagnostics(const mgl_boost_model* model, const mgl_dataset* data,
                                 double* out, size_t rows) {
  if (require(model && data && out, "null argument") != MGL_OK) return MGL_ERR_INVALID;
  return guarded([&] {
    const auto table = staged_diagnostics(model->value.model, data->value);
    if (rows != table.size())
      throw std::invalid_argument("diagnostics buffer has wrong row count");
    for (size_t i = 0; i < table.size(); ++i) {
      out[i * 4 + 0] = static_cast<double>(table[i].stage);
      out[i * 4 + 1] = table[i].train_risk;
      out[i * 4 + 2] = table[i].r_emp;
      out[i * 4 + 3] = table[i].misclassification;
    }
  });
}

}  // extern "C"
