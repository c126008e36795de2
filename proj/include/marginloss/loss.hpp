#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "marginloss/distributions.hpp"
#include "marginloss/weights.hpp"

namespace marginloss {

/// Closed forms recognized by the factory. Everything else evaluates by
/// adaptive quadrature of h(w) = q(w)^{-1/2} g(w).
enum class LossForm {
  quadrature,
  exp_scaled,    // logistic G, constant weight c:  k + 2c(e^{-v/2} - 1)
  logistic_ll,   // logistic G, likelihood weight:  k - ln 2 + log(1+e^{-v})
  savage_scaled, // logistic G, savage weight c:    k - c/8 + (c/2)(1+e^v)^{-2}
  gaussian,      // logistic G, gaussian kernel m:  k + npcdf(m/2 / sqrt m) - npcdf((v+m/2)/sqrt m)
  laplace,       // logistic G, laplace kernel m:   two-branch form, k - 1 + B(v)
  squared,       // uniform G:                      k - 1 + (1-v)^2
  exp_unit,      // e^{-v}; margin-rescaled exponential, not generated by an even weight
};

/// A margin loss phi(v) = k - integral_0^v q(w)^{-1/2} g(w) dw, nonincreasing
/// and differentiable, with phi(0) = k and phi'(-v)/phi'(v) = q(v).
class ConformableLoss {
 public:
  double operator()(double v) const { return eval(v); }
  double eval(double v) const;

  /// Exact derivative -q(v)^{-1/2} g(v); no differencing.
  double derivative(double v) const;

  /// Evaluates by quadrature regardless of any registered closed form.
  /// The independent route used to validate closed forms.
  double eval_quadrature(double v, double abs_tol = 1e-10) const;

  /// g(v) for the generating weight. Unsupported for exp_unit, which is not
  /// generated by an even weight.
  double weight_value(double v) const;

  double k() const { return k_; }
  const SymmetricCdf& dist() const { return dist_; }
  const WeightFn& weight() const { return weight_; }
  LossForm form() const { return form_; }
  bool has_closed_form() const { return form_ != LossForm::quadrature; }
  const std::string& name() const { return name_; }

  bool in_domain(double v) const { return dist_.contains(v); }
  double domain_min() const { return dist_.support_min(); }
  double domain_max() const { return dist_.support_max(); }

 private:
  ConformableLoss(SymmetricCdf dist, WeightFn weight, double k, LossForm form,
                  double param, std::string name)
      : dist_(dist), weight_(std::move(weight)), k_(k), form_(form), param_(param),
        name_(std::move(name)) {}

  void require_in_domain(double v) const;

  friend ConformableLoss make_loss(const SymmetricCdf&, const WeightFn&, double);
  friend ConformableLoss named_loss(const std::string&);

  SymmetricCdf dist_;
  WeightFn weight_;
  double k_;
  LossForm form_;
  double param_;  // c for exp/savage scaling, m for gaussian/laplace
  std::string name_;
};

struct ConformabilityReport {
  bool pass = false;
  double max_rel_err = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // grid points where phi'(v) = 0
};

struct ConvexityReport {
  bool convex = false;
  // max over the grid of d/dv log(-phi'(v)) = d/dv log g - (1/2) d/dv log q;
  // the loss is convex iff this never exceeds zero.
  double max_violation = 0.0;
};

struct LossTable {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> derivatives;
};

/// Builds the loss for (G, g, k). Rejects k <= 0 and custom weights that fail
/// the evenness check on the built-in grid. Registers a closed form when the
/// pair matches one.
ConformableLoss make_loss(const SymmetricCdf& dist, const WeightFn& weight, double k);

/// Builds a loss from the alternative parameterization
/// h(w) = q(w)^{-1/2} b(G(w)) g(w), where b maps (0,1) to the positive reals
/// with b(x) = b(1-x). The reflection identity is verified on a probability
/// grid before construction.
ConformableLoss reparameterize(const SymmetricCdf& dist,
                               const std::function<double(double)>& b,
                               const WeightFn& weight, double k);

/// CLI loss names: "exponential", "logistic", "savage", "gaussian[:m]",
/// "laplace[:m]", "squared", "exp-unit". Defaults: gaussian m=1, laplace m=2.
ConformableLoss named_loss(const std::string& name);

/// Relative-error test of phi'(-v)/phi'(v) against q(v) over the grid;
/// passes at 1e-8. Zero-derivative points are skipped and counted.
ConformabilityReport conformability_check(const ConformableLoss& loss,
                                          std::span<const double> grid);

/// Checks d/dv log g(v) <= (1/2) d/dv log q(v) at every grid point.
/// Requires a weight log-derivative.
ConvexityReport convexity_check(const ConformableLoss& loss,
                                std::span<const double> grid);

LossTable tabulate(const ConformableLoss& loss, double v_min, double v_max,
                   std::size_t n_points);

/// The built-in grid for evenness/conformability checks: +/-0.25..10 for
/// unbounded supports (plus +/-0.001, and +/-50 for logistic G),
/// +/-0.05..0.95 for the uniform.
std::vector<double> default_check_grid(const SymmetricCdf& dist);

}  // namespace marginloss
