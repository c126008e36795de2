#include "marginloss/residuals.hpp"

#include <cmath>
#include <stdexcept>

namespace marginloss {

namespace {
constexpr double kLogSpaceMargin = 60.0;

void require_label(int y_star) {
  if (y_star != 1 && y_star != -1)
    throw std::invalid_argument("label must be +1 or -1");
}
}  // namespace

SlrrValue slrr(int y_star, double f) {
  require_label(y_star);
  if (!std::isfinite(f)) throw std::invalid_argument("f must be finite");
  SlrrValue value;
  value.y_star = y_star;
  value.margin = static_cast<double>(y_star) * f;
  value.s = static_cast<double>(y_star) * std::exp(-0.5 * value.margin);
  return value;
}

SlrrValue slrr_from_residual(double s) {
  if (s == 0.0 || !std::isfinite(s))
    throw std::domain_error("residual must be finite and nonzero");
  SlrrValue value;
  value.y_star = s > 0.0 ? 1 : -1;
  value.s = s;
  value.margin = -2.0 * std::log(std::abs(s));
  return value;
}

double margin_of(const SlrrValue& value) {
  if (std::abs(value.margin) > kLogSpaceMargin) return value.margin;
  if (value.s == 0.0) throw std::domain_error("residual is zero");
  return -2.0 * std::log(std::abs(value.s));
}

PartitionResult partition(int y_star, std::span<const Component> components) {
  require_label(y_star);
  if (components.empty()) throw std::invalid_argument("empty component list");
  PartitionResult result;
  result.factor_s2.reserve(components.size());
  double total_margin = 0.0;
  for (const Component& c : components) {
    if (!std::isfinite(c.theta) || !std::isfinite(c.basis_value))
      throw std::invalid_argument("non-finite component");
    const double piece = c.theta * c.basis_value;
    total_margin += piece;
    result.factor_s2.push_back(std::exp(-static_cast<double>(y_star) * piece));
  }
  result.total_s2 = std::exp(-static_cast<double>(y_star) * total_margin);
  return result;
}

double contribution_ratio(int y_star, std::span<const Component> components,
                          std::size_t k) {
  require_label(y_star);
  if (k >= components.size()) throw std::invalid_argument("component index out of range");
  double total = 0.0;
  for (const Component& c : components) total += c.theta * c.basis_value;
  if (total == 0.0)
    throw std::domain_error("contribution ratio undefined at zero total margin");
  return components[k].theta * components[k].basis_value / total;
}

double contribution_vs_geometric_mean(int y_star,
                                      std::span<const Component> components,
                                      std::size_t k) {
  require_label(y_star);
  if (components.empty()) throw std::invalid_argument("empty component list");
  if (k >= components.size()) throw std::invalid_argument("component index out of range");
  double total = 0.0;
  for (const Component& c : components) total += c.theta * c.basis_value;
  const double mean = total / static_cast<double>(components.size());
  const double piece = components[k].theta * components[k].basis_value;
  // log S^2(v) = -y* v, so the log ratio is y* (mean - piece).
  return static_cast<double>(y_star) * (mean - piece);
}

double loss_on_residual_scale(const ConformableLoss& loss, double s_abs) {
  if (!(s_abs > 0.0)) throw std::domain_error("residual magnitude must be positive");
  const double v = -2.0 * std::log(s_abs);
  if (!loss.in_domain(v))
    throw std::domain_error("residual maps to a margin outside the loss domain");
  return loss.eval(v);
}

}  // namespace marginloss
