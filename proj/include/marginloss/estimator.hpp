#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "marginloss/dataset.hpp"
#include "marginloss/loss.hpp"

namespace marginloss {

enum class FitStatus { converged, max_iterations, diverged_separable };
std::string fit_status_name(FitStatus status);
FitStatus parse_fit_status(const std::string& name);

using BasisFn = std::function<double(std::span<const double>)>;

/// f(x; beta) = beta' d(x) where d(x) is the design vector: the raw features
/// for the linear kind, or fixed basis-function values. An optional intercept
/// prepends a constant-1 coordinate. Basis parameters are fixed at spec time;
/// stagewise basis training lives in the boosting module.
class ModelSpec {
 public:
  static ModelSpec linear(std::size_t p, bool intercept = false);
  static ModelSpec basis_expansion(std::size_t p, std::vector<BasisFn> bases,
                                   bool intercept = false);

  std::size_t feature_dim() const { return p_; }
  std::size_t dimension() const { return (intercept_ ? 1 : 0) + (linear_ ? p_ : bases_.size()); }
  bool intercept() const { return intercept_; }
  bool is_linear() const { return linear_; }

  void design_row(std::span<const double> x, std::span<double> out) const;
  std::vector<double> design_row(std::span<const double> x) const;

 private:
  ModelSpec(std::size_t p, bool linear, std::vector<BasisFn> bases, bool intercept);

  std::size_t p_;
  bool linear_;
  bool intercept_;
  std::vector<BasisFn> bases_;
};

struct FitOptions {
  double tolerance = 1e-8;       // convergence when the gradient inf-norm falls below
  std::size_t max_iterations = 20000;
  std::size_t restarts = 1;      // total starts; the first is beta = 0, the rest
                                 // are drawn uniform on [-1,1]^dim from the seed
  std::uint64_t seed = 0;
  int threads = 1;
};

struct FitResult {
  std::vector<double> beta;
  FitStatus status = FitStatus::max_iterations;
  std::size_t iterations = 0;
  double final_risk = 0.0;
  double gradient_norm = 0.0;
};

/// (1/n) sum phi(y_i f(x_i; beta)).
double empirical_risk(const ConformableLoss& loss, const ModelSpec& spec,
                      std::span<const double> beta, const Dataset& data,
                      int threads = 1);

/// (1/n) sum phi'(y_i f_i) y_i d(x_i).
std::vector<double> risk_gradient(const ConformableLoss& loss, const ModelSpec& spec,
                                  std::span<const double> beta, const Dataset& data,
                                  int threads = 1);

/// Gradient descent with backtracking line search (Armijo 1e-4, shrink 0.5).
/// The trial step doubles from the previous accepted step, so runs on
/// separable data race to the divergence threshold instead of stalling.
/// Separation is declared when the gradient tolerance is met while every
/// training margin is strictly positive (the loss tails have flattened out),
/// or when ||beta||_inf exceeds 1e4.
FitResult fit(const ConformableLoss& loss, const ModelSpec& spec, const Dataset& data,
              const FitOptions& options = {});

/// Per-observation estimating score d/dbeta phi(y* f(x; beta)).
std::vector<double> score_at(const ConformableLoss& loss, const ModelSpec& spec,
                             std::span<const double> beta, std::span<const double> x,
                             int y_star);

/// Conditional score variance  g^2(f) d d'   (row-major dimension^2).
std::vector<double> score_variance(const ConformableLoss& loss, const ModelSpec& spec,
                                   std::span<const double> beta,
                                   std::span<const double> x);

/// Conditional score sensitivity  [G'(f) g(f) / sqrt(G(f)(1-G(f)))] d d'.
std::vector<double> score_sensitivity(const ConformableLoss& loss, const ModelSpec& spec,
                                      std::span<const double> beta,
                                      std::span<const double> x);

/// Minimizes sum_i exp(-y_i f_i p/2) = sum_i |S_i|^p. p = 2 coincides with
/// the exp-unit loss fit.
FitResult pnorm_fit(const ModelSpec& spec, const Dataset& data, double p,
                    const FitOptions& options = {});

/// sum_i exp(-y_i f_i p/2): the p-th power of the residual p-norm.
double pnorm_objective(const ModelSpec& spec, std::span<const double> beta,
                       const Dataset& data, double p, int threads = 1);

double predict(const ModelSpec& spec, std::span<const double> beta,
               std::span<const double> x);

struct Classification {
  int label = 1;
  bool degenerate = false;  // f was exactly zero; +1 by convention
};
Classification classify(const ModelSpec& spec, std::span<const double> beta,
                        std::span<const double> x);

/// Logistic-scale confidence F(f(x; beta)).
double soft_probability(const ModelSpec& spec, std::span<const double> beta,
                        std::span<const double> x);

/// G-scale probability for a loss conformable to G != F (saturating at the
/// support boundary).
double g_probability(const SymmetricCdf& dist, double f);

/// R_Emp = (1/n) sum exp(-y_i f_i): the exponential empirical risk, equal to
/// the mean squared standardized logistic residual.
double exp_empirical_risk(const ModelSpec& spec, std::span<const double> beta,
                          const Dataset& data, int threads = 1);

}  // namespace marginloss
