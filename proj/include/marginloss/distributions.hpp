#pragma once

#include <limits>
#include <string>

namespace marginloss {

enum class CdfKind { logistic, uniform_pm1, gaussian };

/// A continuous CDF symmetric about 1/2: G(w) + G(-w) = 1, G(0) = 1/2.
///
/// Three members are provided: the standard logistic F(w) = 1/(1+e^{-w}),
/// the uniform distribution on (-1, 1), and the standard normal. The odds
/// transform q(w) = G(w)/(1-G(w)) and its inverse square root are exposed
/// directly because every loss construction routes through them.
class SymmetricCdf {
 public:
  static SymmetricCdf logistic() { return SymmetricCdf(CdfKind::logistic); }
  static SymmetricCdf uniform_pm1() { return SymmetricCdf(CdfKind::uniform_pm1); }
  static SymmetricCdf gaussian() { return SymmetricCdf(CdfKind::gaussian); }

  /// Parses "logistic", "uniform" or "gaussian". Throws std::invalid_argument.
  static SymmetricCdf parse(const std::string& name);

  CdfKind kind() const { return kind_; }
  std::string name() const;

  /// G(w). Throws std::domain_error outside the support interior.
  double cdf(double w) const;

  /// G(w) clamped to [0, 1] outside the support; used for simulation and
  /// probability reporting where saturation is the intended semantics.
  double cdf_saturating(double w) const;

  /// Density G'(w); an even function.
  double density(double w) const;

  /// G''(w).
  double density_derivative(double w) const;

  /// Odds q(w) = G(w)/(1-G(w)); satisfies q(w) q(-w) = 1.
  double odds(double w) const;

  /// q(w)^{-1/2}, evaluated in a form that avoids overflow (logistic uses
  /// e^{-w/2} directly).
  double inv_sqrt_odds(double w) const;

  /// G(w)(1-G(w)) computed from an even expression so that the result is
  /// bitwise symmetric in w.
  double cdf_complement_product(double w) const;

  /// d/dw log q(w); constant 1 for the logistic.
  double log_odds_derivative(double w) const;

  bool contains(double w) const;
  double support_min() const;
  double support_max() const;
  bool bounded_support() const { return kind_ == CdfKind::uniform_pm1; }

  bool operator==(const SymmetricCdf& other) const { return kind_ == other.kind_; }

 private:
  explicit SymmetricCdf(CdfKind kind) : kind_(kind) {}
  void require_in_support(double w) const;

  CdfKind kind_;
};

}  // namespace marginloss
