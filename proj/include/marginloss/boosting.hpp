#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "marginloss/dataset.hpp"

namespace marginloss {

/// A single-threshold weak classifier: predicts `polarity` where
/// x[feature_index] > threshold and -polarity otherwise.
struct Stump {
  std::size_t feature_index = 0;
  double threshold = 0.0;
  int polarity = 1;

  int predict(std::span<const double> x) const {
    return x[feature_index] > threshold ? polarity : -polarity;
  }
};

enum class BoostStatus {
  completed,          // ran all requested stages
  r_emp_stop,         // exponential empirical risk reached the stop value
  perfect_stump,      // a stage classified every row correctly (theta capped)
  no_improving_stump, // best weighted error >= 1/2; stage not added
};
std::string boost_status_name(BoostStatus status);

struct BoostModel {
  struct Stage {
    double theta = 0.0;
    Stump stump;
  };
  std::vector<Stage> stages;
  /// R_Emp of the truncated model after 0, 1, ..., M stages (index 0 is the
  /// empty model, exactly 1 on any data).
  std::vector<double> staged_r_emp;
};

struct BoostOptions {
  std::size_t n_stages = 0;
  std::optional<double> r_emp_stop;  // stop once R_Emp <= this value
  std::uint64_t seed = 0;            // reserved; training itself is deterministic
};

struct BoostTraining {
  BoostModel model;
  BoostStatus status = BoostStatus::completed;
  /// stage_weights[m][i]: the unnormalized weight of row i entering stage m,
  /// i.e. exp(-y_i f_m(x_i)) accumulated from the first m stages. Retained so
  /// the product-of-squared-residuals identity can be verified externally.
  std::vector<std::vector<double>> stage_weights;
};

/// AdaBoost with decision stumps: each stage picks the stump minimizing the
/// weighted 0-1 error (exhaustive over features and midpoints of sorted
/// unique values; ties broken by lower feature index, then lower threshold,
/// then polarity +1) and weights it by theta = log((1-err)/err)/2. A perfect
/// stump is capped at err = 1e-10 and training halts after that stage.
BoostTraining train_adaboost(const Dataset& data, const BoostOptions& options);

double boost_predict(const BoostModel& model, std::span<const double> x);
int boost_classify(const BoostModel& model, std::span<const double> x);

struct StageDiagnostics {
  std::size_t stage = 0;           // number of stages in the truncated model
  double train_risk = 0.0;         // mean exp(-y f / 2), the half-rate exponential risk
  double r_emp = 0.0;              // mean exp(-y f)
  double misclassification = 0.0;  // 0-1 error of sign(f), sign(0) = +1
};

/// Metrics of every truncated model (stage 0 through all stages) on `data`.
std::vector<StageDiagnostics> staged_diagnostics(const BoostModel& model,
                                                 const Dataset& data);

}  // namespace marginloss
