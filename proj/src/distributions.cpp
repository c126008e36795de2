#include "marginloss/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace marginloss {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
constexpr double kInvSqrt2 = 0.70710678118654752440;    // 1/sqrt(2)

// Stable logistic CDF: never forms e^{+|w|}.
double logistic_cdf(double w) {
  if (w >= 0.0) return 1.0 / (1.0 + std::exp(-w));
  const double e = std::exp(w);
  return e / (1.0 + e);
}

// F(w)(1-F(w)) = t/(1+t)^2 with t = e^{-|w|}; even in w by construction.
double logistic_prod(double w) {
  const double t = std::exp(-std::abs(w));
  const double d = 1.0 + t;
  return t / (d * d);
}

double normal_cdf(double w) { return 0.5 * std::erfc(-w * kInvSqrt2); }

double normal_pdf(double w) { return kInvSqrt2Pi * std::exp(-0.5 * w * w); }

}  // namespace

SymmetricCdf SymmetricCdf::parse(const std::string& name) {
  if (name == "logistic") return logistic();
  if (name == "uniform") return uniform_pm1();
  if (name == "gaussian") return gaussian();
  throw std::invalid_argument("unknown distribution: " + name);
}

std::string SymmetricCdf::name() const {
  switch (kind_) {
    case CdfKind::logistic: return "logistic";
    case CdfKind::uniform_pm1: return "uniform";
    case CdfKind::gaussian: return "gaussian";
  }
  return "?";
}

void SymmetricCdf::require_in_support(double w) const {
  if (!std::isfinite(w)) throw std::domain_error("non-finite argument");
  if (kind_ == CdfKind::uniform_pm1 && std::abs(w) >= 1.0)
    throw std::domain_error("argument outside open support (-1, 1)");
}

bool SymmetricCdf::contains(double w) const {
  if (!std::isfinite(w)) return false;
  return kind_ != CdfKind::uniform_pm1 || std::abs(w) < 1.0;
}

double SymmetricCdf::support_min() const {
  return kind_ == CdfKind::uniform_pm1 ? -1.0 : -std::numeric_limits<double>::infinity();
}

double SymmetricCdf::support_max() const {
  return kind_ == CdfKind::uniform_pm1 ? 1.0 : std::numeric_limits<double>::infinity();
}

double SymmetricCdf::cdf(double w) const {
  require_in_support(w);
  switch (kind_) {
    case CdfKind::logistic: return logistic_cdf(w);
    case CdfKind::uniform_pm1: return 0.5 * (w + 1.0);
    case CdfKind::gaussian: return normal_cdf(w);
  }
  return 0.0;
}

double SymmetricCdf::cdf_saturating(double w) const {
  if (kind_ == CdfKind::uniform_pm1) {
    if (w <= -1.0) return 0.0;
    if (w >= 1.0) return 1.0;
    return 0.5 * (w + 1.0);
  }
  return kind_ == CdfKind::logistic ? logistic_cdf(w) : normal_cdf(w);
}

double SymmetricCdf::density(double w) const {
  require_in_support(w);
  switch (kind_) {
    case CdfKind::logistic: return logistic_prod(w);
    case CdfKind::uniform_pm1: return 0.5;
    case CdfKind::gaussian: return normal_pdf(w);
  }
  return 0.0;
}

double SymmetricCdf::density_derivative(double w) const {
  require_in_support(w);
  switch (kind_) {
    case CdfKind::logistic:
      // F'' = F(1-F)(1-2F); 1-2F(w) = -tanh(w/2).
      return -logistic_prod(w) * std::tanh(0.5 * w);
    case CdfKind::uniform_pm1: return 0.0;
    case CdfKind::gaussian: return -w * normal_pdf(w);
  }
  return 0.0;
}

double SymmetricCdf::odds(double w) const {
  require_in_support(w);
  switch (kind_) {
    case CdfKind::logistic: return std::exp(w);
    case CdfKind::uniform_pm1: return (1.0 + w) / (1.0 - w);
    case CdfKind::gaussian: return normal_cdf(w) / normal_cdf(-w);
  }
  return 0.0;
}

double SymmetricCdf::inv_sqrt_odds(double w) const {
  require_in_support(w);
  switch (kind_) {
    case CdfKind::logistic: return std::exp(-0.5 * w);
    case CdfKind::uniform_pm1: return std::sqrt((1.0 - w) / (1.0 + w));
    case CdfKind::gaussian: return std::sqrt(normal_cdf(-w) / normal_cdf(w));
  }
  return 0.0;
}

double SymmetricCdf::cdf_complement_product(double w) const {
  require_in_support(w);
  switch (kind_) {
    case CdfKind::logistic: return logistic_prod(w);
    case CdfKind::uniform_pm1: return 0.25 * (1.0 - w * w);
    case CdfKind::gaussian: {
      const double a = normal_cdf(-std::abs(w));  // accurate tail
      return a * (1.0 - a);
    }
  }
  return 0.0;
}

double SymmetricCdf::log_odds_derivative(double w) const {
  require_in_support(w);
  switch (kind_) {
    case CdfKind::logistic: return 1.0;
    case CdfKind::uniform_pm1: return 2.0 / (1.0 - w * w);
    case CdfKind::gaussian: return normal_pdf(w) / cdf_complement_product(w);
  }
  return 0.0;
}

}  // namespace marginloss
