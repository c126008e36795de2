#include "marginloss/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace marginloss {

namespace {

constexpr double kPerfectStumpEps = 1e-10;

struct StumpSearch {
  Stump stump;
  double weighted_error = 1.0;
};

/// Exhaustive weighted 0-1 stump search. Candidates are midpoints of sorted
/// unique values per feature; strict improvement keeps the first-best, which
/// realizes the (feature, threshold, polarity +1 first) tie order.
StumpSearch best_stump(const Dataset& data, std::span<const double> weights) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();

  StumpSearch best;
  bool found = false;
  std::vector<double> values;
  for (std::size_t feature = 0; feature < p; ++feature) {
    values.clear();
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) values.push_back(data.row(i)[feature]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
      const double threshold = 0.5 * (values[t] + values[t + 1]);
      // err_pos: weighted error of the polarity +1 stump. The -1 stump
      // misclassifies exactly the complement: err_neg = 1 - err_pos.
      double err_pos = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const int pred = data.row(i)[feature] > threshold ? 1 : -1;
        if (pred != data.label(i)) err_pos += weights[i];
      }
      for (const int polarity : {1, -1}) {
        const double err = polarity == 1 ? err_pos : 1.0 - err_pos;
        if (!found || err < best.weighted_error) {
          best.stump = Stump{feature, threshold, polarity};
          best.weighted_error = err;
          found = true;
        }
      }
    }
  }
  if (!found) throw std::invalid_argument("no stump candidates: a feature with at least two distinct values is required");
  return best;
}

}  // namespace

std::string boost_status_name(BoostStatus status) {
  switch (status) {
    case BoostStatus::completed: return "completed";
    case BoostStatus::r_emp_stop: return "r_emp_stop";
    case BoostStatus::perfect_stump: return "perfect_stump";
    case BoostStatus::no_improving_stump: return "no_improving_stump";
  }
  return "?";
}

BoostTraining train_adaboost(const Dataset& data, const BoostOptions& options) {
  if (options.n_stages < 1) throw std::invalid_argument("n_stages must be >= 1");
  const std::size_t n = data.rows();
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t i = 0; i < n; ++i) (data.label(i) == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw std::invalid_argument("boosting needs rows of both labels");

  BoostTraining training;
  training.model.staged_r_emp.push_back(1.0);  // empty model: every margin is 0

  // margins[i] = y_i f_m(x_i); unnormalized[i] = exp(-margins[i]), the
  // running product of per-stage squared residuals.
  std::vector<double> margins(n, 0.0);
  std::vector<double> unnormalized(n, 1.0);
  std::vector<double> weights(n);

  training.status = BoostStatus::completed;
  for (std::size_t stage = 0; stage < options.n_stages; ++stage) {
    training.stage_weights.push_back(unnormalized);

    // Normalize in log space: weights are exp(-margin - max(-margin)).
    double max_neg_margin = -margins[0];
    for (std::size_t i = 1; i < n; ++i) max_neg_margin = std::max(max_neg_margin, -margins[i]);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = std::exp(-margins[i] - max_neg_margin);
      total += weights[i];
    }
    for (std::size_t i = 0; i < n; ++i) weights[i] /= total;

    const StumpSearch found = best_stump(data, weights);
    if (found.weighted_error >= 0.5) {
      training.status = BoostStatus::no_improving_stump;
      break;
    }
    const bool perfect = found.weighted_error <= 0.0;
    const double err = perfect ? kPerfectStumpEps : found.weighted_error;
    const double theta = 0.5 * std::log((1.0 - err) / err);

    training.model.stages.push_back({theta, found.stump});
    double r_emp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double step = theta * static_cast<double>(found.stump.predict(data.row(i)));
      margins[i] += static_cast<double>(data.label(i)) * step;
      unnormalized[i] *= std::exp(-static_cast<double>(data.label(i)) * step);
      r_emp += std::exp(-margins[i]);
    }
    training.model.staged_r_emp.push_back(r_emp / static_cast<double>(n));

    if (perfect) {
      // Re-weighting leaves the normalized weights unchanged, so every later
      // stage would pick this stump again; stop here.
      training.status = BoostStatus::perfect_stump;
      break;
    }
    if (options.r_emp_stop && training.model.staged_r_emp.back() <= *options.r_emp_stop) {
      training.status = BoostStatus::r_emp_stop;
      break;
    }
  }
  return training;
}

double boost_predict(const BoostModel& model, std::span<const double> x) {
  if (model.stages.empty()) throw std::invalid_argument("empty boosting model");
  double f = 0.0;
  for (const auto& stage : model.stages)
    f += stage.theta * static_cast<double>(stage.stump.predict(x));
  return f;
}

int boost_classify(const BoostModel& model, std::span<const double> x) {
  return boost_predict(model, x) >= 0.0 ? 1 : -1;
}

std::vector<StageDiagnostics> staged_diagnostics(const BoostModel& model,
                                                 const Dataset& data) {
  const std::size_t n = data.rows();
  std::vector<double> f(n, 0.0);
  std::vector<StageDiagnostics> table;
  table.reserve(model.stages.size() + 1);

  for (std::size_t stage = 0; stage <= model.stages.size(); ++stage) {
    if (stage > 0) {
      const auto& s = model.stages[stage - 1];
      for (std::size_t i = 0; i < n; ++i)
        f[i] += s.theta * static_cast<double>(s.stump.predict(data.row(i)));
    }
    StageDiagnostics diag;
    diag.stage = stage;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(data.label(i)) * f[i];
      diag.train_risk += std::exp(-0.5 * v);
      diag.r_emp += std::exp(-v);
      const int pred = f[i] >= 0.0 ? 1 : -1;
      if (pred != data.label(i)) diag.misclassification += 1.0;
    }
    diag.train_risk /= static_cast<double>(n);
    diag.r_emp /= static_cast<double>(n);
    diag.misclassification /= static_cast<double>(n);
    table.push_back(diag);
  }
  return table;
}

}  // namespace marginloss
