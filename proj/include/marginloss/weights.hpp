#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "marginloss/distributions.hpp"

namespace marginloss {

enum class WeightKind {
  constant,
  likelihood,
  savage,
  gaussian_kernel,
  laplace_kernel,
  buzas2009,
  custom,
};

struct EvennessReport {
  bool even = false;
  double max_asymmetry = 0.0;  // max over the grid of |g(w)-g(-w)| / (1+|g(w)|)
};

/// An even, nonnegative weight function g(w). Together with a SymmetricCdf it
/// indexes one loss function: the loss derivative is -q(w)^{-1/2} g(w).
///
/// Named forms (d = G', P = G(1-G)):
///   constant        g(w) = c
///   likelihood      g(w) = d(w)/sqrt(P(w))
///   savage          g(w) = c * P(w)^{3/2}
///   gaussian_kernel g(w) = exp(-w^2/(2m) - m/8) / sqrt(2*pi*m)
///   laplace_kernel  g(w) = ((m+1)/2) * exp(-m|w|/2)
///   buzas2009       g(w) = (1/m) * npdf(w/m) / sqrt(P(w))
class WeightFn {
 public:
  using Eval = std::function<double(double)>;

  /// Custom weights must declare how evenness is handled: either the caller
  /// asserts g is even (construction of a loss then verifies it on a grid),
  /// or the weight is symmetrized to (g(w)+g(-w))/2 before use.
  enum class Evenness { assert_even, symmetrize };

  static WeightFn constant(double c);
  static WeightFn likelihood();
  static WeightFn savage(double scale = 1.0);
  static WeightFn gaussian_kernel(double m);
  static WeightFn laplace_kernel(double m);
  static WeightFn buzas2009(double m = 1.0);
  static WeightFn custom(Eval g, Evenness evenness,
                         std::optional<Eval> log_derivative = std::nullopt,
                         std::string label = "custom");

  /// g(w)^alpha, with the log-derivative scaled by alpha when available.
  static WeightFn power(const WeightFn& base, double alpha);

  /// Parses a CLI identifier: "constant:<c>", "likelihood", "savage",
  /// "gauss:<m>", "laplace:<m>", "buzas2009[:<m>]".
  static WeightFn parse(const std::string& spec);

  WeightKind kind() const { return kind_; }
  double param() const { return param_; }
  std::string name() const { return name_; }

  /// g(w). Throws std::domain_error outside the support of dist.
  double operator()(const SymmetricCdf& dist, double w) const;

  /// d/dw log g(w). Throws UnsupportedError for customs without a derivative
  /// and std::domain_error where g vanishes.
  double log_derivative(const SymmetricCdf& dist, double w) const;
  bool has_log_derivative() const;

  /// True iff |g(w) - g(-w)| <= 1e-9 * (1 + |g(w)|) at every grid point.
  EvennessReport check_even(const SymmetricCdf& dist, std::span<const double> grid) const;

  bool requires_even_check() const {
    return kind_ == WeightKind::custom && evenness_ == Evenness::assert_even;
  }

 private:
  WeightFn(WeightKind kind, double param, std::string name)
      : kind_(kind), param_(param), name_(std::move(name)) {}

  double eval_raw(const SymmetricCdf& dist, double w) const;

  WeightKind kind_;
  double param_ = 0.0;   // c for constant, m for the kernels, scale for savage
  std::string name_;
  Evenness evenness_ = Evenness::assert_even;
  std::function<double(const SymmetricCdf&, double)> custom_eval_;
  std::function<double(const SymmetricCdf&, double)> custom_log_deriv_;
};

}  // namespace marginloss
