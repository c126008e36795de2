#include "marginloss/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "marginloss/errors.hpp"
#include "marginloss/quadrature.hpp"

namespace marginloss {

namespace {

double stable_log1pexp(double v) {
  // log(1 + e^{-v}) without overflow for very negative v.
  if (v >= 0.0) return std::log1p(std::exp(-v));
  return -v + std::log1p(std::exp(v));
}

double logistic_cdf_neg(double v) {
  // F(-v) = 1/(1+e^v), stable on both sides.
  if (v <= 0.0) return 1.0 / (1.0 + std::exp(v));
  const double e = std::exp(-v);
  return e / (1.0 + e);
}

double laplace_branch(double v, double m) {
  if (v > 0.0) return std::exp(-0.5 * v * (1.0 + m));
  if (m == 1.0) return 1.0 - v;  // analytic m -> 1 limit of the lower branch
  return 1.0 - (m + 1.0) / (m - 1.0) * std::expm1(0.5 * v * (m - 1.0));
}

}  // namespace

void ConformableLoss::require_in_domain(double v) const {
  if (!dist_.contains(v))
    throw std::domain_error("margin outside the loss domain");
}

double ConformableLoss::eval(double v) const {
  require_in_domain(v);
  switch (form_) {
    case LossForm::exp_scaled:
      return k_ + 2.0 * param_ * std::expm1(-0.5 * v);
    case LossForm::logistic_ll:
      return k_ - M_LN2 + stable_log1pexp(v);
    case LossForm::savage_scaled: {
      const double c = logistic_cdf_neg(v);
      return k_ - 0.125 * param_ + 0.5 * param_ * c * c;
    }
    case LossForm::gaussian: {
      const double m = param_;
      const double root = std::sqrt(m);
      const double u = (v + 0.5 * m) / root;
      const auto normal = SymmetricCdf::gaussian();
      const double k_named = normal.cdf(-0.5 * root);
      if (k_ == k_named) return normal.cdf(-u);  // 1 - npcdf(u), tail-accurate
      return k_ + normal.cdf(0.5 * root) - normal.cdf(u);
    }
    case LossForm::laplace:
      return k_ - 1.0 + laplace_branch(v, param_);
    case LossForm::squared:
      return k_ - 1.0 + (1.0 - v) * (1.0 - v);
    case LossForm::exp_unit:
      return k_ - 1.0 + std::exp(-v);
    case LossForm::quadrature:
      return eval_quadrature(v);
  }
  return 0.0;
}

double ConformableLoss::eval_quadrature(double v, double abs_tol) const {
  require_in_domain(v);
  const auto h = [this](double w) {
    return dist_.inv_sqrt_odds(w) * weight_(dist_, w);
  };
  return k_ - integrate(h, 0.0, v, abs_tol);
}

double ConformableLoss::derivative(double v) const {
  require_in_domain(v);
  if (form_ == LossForm::exp_unit) return -std::exp(-v);
  return -dist_.inv_sqrt_odds(v) * weight_(dist_, v);
}

double ConformableLoss::weight_value(double v) const {
  if (form_ == LossForm::exp_unit)
    throw UnsupportedError("exp-unit loss is not generated by an even weight");
  return weight_(dist_, v);
}

ConformableLoss make_loss(const SymmetricCdf& dist, const WeightFn& weight, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("loss constant k must be positive");
  if (weight.requires_even_check()) {
    // The gate grid stays within |w| <= 12: far spot-check points can push
    // tail-singular customs (e.g. b(G(w)) factors) past double range.
    auto grid = default_check_grid(dist);
    std::erase_if(grid, [](double w) { return std::abs(w) > 12.0; });
    const auto report = weight.check_even(dist, grid);
    if (!report.even)
      throw std::invalid_argument("weight is not even (max asymmetry " +
                                  std::to_string(report.max_asymmetry) + ")");
  }

  LossForm form = LossForm::quadrature;
  double param = 0.0;
  if (dist.kind() == CdfKind::logistic) {
    switch (weight.kind()) {
      case WeightKind::constant:
        form = LossForm::exp_scaled;
        param = weight.param();
        break;
      case WeightKind::likelihood:
        form = LossForm::logistic_ll;
        break;
      case WeightKind::savage:
        form = LossForm::savage_scaled;
        param = weight.param();
        break;
      case WeightKind::gaussian_kernel:
        form = LossForm::gaussian;
        param = weight.param();
        break;
      case WeightKind::laplace_kernel:
        form = LossForm::laplace;
        param = weight.param();
        break;
      default:
        break;
    }
  }
  return ConformableLoss(dist, weight, k, form, param,
                         dist.name() + "+" + weight.name());
}

ConformableLoss reparameterize(const SymmetricCdf& dist,
                               const std::function<double(double)>& b,
                               const WeightFn& weight, double k) {
  if (!b) throw std::invalid_argument("reparameterize requires b");
  for (int i = 1; i < 50; ++i) {
    const double x = 0.01 * i;
    const double lhs = b(x);
    const double rhs = b(1.0 - x);
    if (!(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(lhs))))
      throw std::invalid_argument("b(x) != b(1-x): not a valid reparameterization");
  }
  // Fold b(G(w)) into the weight; the product is even, so the combined
  // weight generates a loss in the same class.
  const WeightFn combined = WeightFn::custom(
      [dist, b, weight](double w) { return b(dist.cdf(w)) * weight(dist, w); },
      WeightFn::Evenness::assert_even, std::nullopt,
      "b(G)*" + weight.name());
  return make_loss(dist, combined, k);
}

ConformableLoss named_loss(const std::string& name) {
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const auto arg = [&](double fallback) -> double {
    if (colon == std::string::npos) return fallback;
    const std::string tail = name.substr(colon + 1);
    std::size_t used = 0;
    const double v = std::stod(tail, &used);
    if (used != tail.size()) throw std::invalid_argument("bad loss parameter: " + name);
    return v;
  };

  const auto logistic = SymmetricCdf::logistic();
  if (head == "exponential") {
    auto loss = make_loss(logistic, WeightFn::constant(0.5), 1.0);
    loss.name_ = "exponential";
    return loss;
  }
  if (head == "logistic") {
    auto loss = make_loss(logistic, WeightFn::likelihood(), M_LN2);
    loss.name_ = "logistic";
    return loss;
  }
  if (head == "savage") {
    // The antiderivative of e^{-w/2} (F(1-F))^{3/2} is half of (1+e^v)^{-2};
    // doubling the weight makes the loss exactly (1+e^v)^{-2} with k = 1/4.
    auto loss = make_loss(logistic, WeightFn::savage(2.0), 0.25);
    loss.name_ = "savage";
    return loss;
  }
  if (head == "gaussian") {
    const double m = arg(1.0);
    if (!(m > 0.0)) throw std::invalid_argument("gaussian loss needs m > 0");
    const double k = SymmetricCdf::gaussian().cdf(-0.5 * std::sqrt(m));
    auto loss = make_loss(logistic, WeightFn::gaussian_kernel(m), k);
    loss.name_ = name;
    return loss;
  }
  if (head == "laplace") {
    const double m = arg(2.0);
    if (!(m > 0.0)) throw std::invalid_argument("laplace loss needs m > 0");
    auto loss = make_loss(logistic, WeightFn::laplace_kernel(m), 1.0);
    loss.name_ = name;
    return loss;
  }
  if (head == "squared") {
    const WeightFn weight = WeightFn::custom(
        [](double w) { return 2.0 * std::sqrt((1.0 + w) * (1.0 - w)); },
        WeightFn::Evenness::assert_even,
        [](double w) { return -w / (1.0 - w * w); }, "squared-weight");
    return ConformableLoss(SymmetricCdf::uniform_pm1(), weight, 1.0,
                           LossForm::squared, 0.0, "squared");
  }
  if (head == "exp-unit") {
    // e^{-v}: the margin-rescaled exponential form. Kept for residual-scale
    // identities; it fails conformability against the logistic odds.
    return ConformableLoss(logistic, WeightFn::constant(1.0), 1.0,
                           LossForm::exp_unit, 0.0, "exp-unit");
  }
  throw std::invalid_argument("unknown loss: " + name);
}

ConformabilityReport conformability_check(const ConformableLoss& loss,
                                          std::span<const double> grid) {
  ConformabilityReport report;
  for (const double v : grid) {
    const double dpos = loss.derivative(v);
    if (dpos == 0.0) {
      ++report.skipped;
      continue;
    }
    const double ratio = loss.derivative(-v) / dpos;
    const double q = loss.dist().odds(v);
    report.max_rel_err = std::max(report.max_rel_err, std::abs(ratio - q) / q);
    ++report.checked;
  }
  report.pass = report.checked > 0 && report.max_rel_err <= 1e-8;
  return report;
}

ConvexityReport convexity_check(const ConformableLoss& loss,
                                std::span<const double> grid) {
  ConvexityReport report;
  bool first = true;
  for (const double v : grid) {
    double slope;  // d/dv log(-phi'(v))
    if (loss.form() == LossForm::exp_unit) {
      slope = -1.0;
    } else {
      slope = loss.weight().log_derivative(loss.dist(), v) -
              0.5 * loss.dist().log_odds_derivative(v);
    }
    report.max_violation = first ? slope : std::max(report.max_violation, slope);
    first = false;
  }
  report.convex = !first && report.max_violation <= 1e-12;
  return report;
}

LossTable tabulate(const ConformableLoss& loss, double v_min, double v_max,
                   std::size_t n_points) {
  if (n_points < 2) throw std::invalid_argument("tabulate needs at least 2 points");
  if (!(v_min < v_max)) throw std::invalid_argument("tabulate needs v_min < v_max");
  if (!loss.in_domain(v_min) || !loss.in_domain(v_max))
    throw std::domain_error("tabulation range outside the loss domain");
  LossTable table;
  table.grid.reserve(n_points);
  table.values.reserve(n_points);
  table.derivatives.reserve(n_points);
  const double step = (v_max - v_min) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double v = i + 1 == n_points ? v_max : v_min + step * static_cast<double>(i);
    table.grid.push_back(v);
    table.values.push_back(loss.eval(v));
    table.derivatives.push_back(loss.derivative(v));
  }
  return table;
}

std::vector<double> default_check_grid(const SymmetricCdf& dist) {
  std::vector<double> grid;
  if (dist.bounded_support()) {
    for (int j = 1; j <= 19; ++j) {
      grid.push_back(0.05 * j);
      grid.push_back(-0.05 * j);
    }
    return grid;
  }
  grid.push_back(0.001);
  grid.push_back(-0.001);
  for (int j = 1; j <= 40; ++j) {
    grid.push_back(0.25 * j);
    grid.push_back(-0.25 * j);
  }
  if (dist.kind() == CdfKind::logistic) {
    grid.push_back(50.0);
    grid.push_back(-50.0);
  }
  return grid;
}

}  // namespace marginloss
