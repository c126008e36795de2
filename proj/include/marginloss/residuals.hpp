#pragma once

#include <span>
#include <vector>

#include "marginloss/loss.hpp"

namespace marginloss {

/// A standardized logistic regression residual s together with the margin it
/// encodes: -log(s^2) = y* f exactly, and s carries the sign of y*.
struct SlrrValue {
  double s = 0.0;
  double margin = 0.0;  // y* f
  int y_star = 1;
};

/// s = y* e^{-y* f / 2}, identical to (y - F(f))/sqrt(F(f)(1-F(f))) with
/// y = (y*+1)/2. For |f| > 60 the exponential is left in log form (s keeps a
/// representable magnitude, the margin field is authoritative).
SlrrValue slrr(int y_star, double f);

/// Wraps a raw residual value: margin = -log(s^2), label = sign(s).
SlrrValue slrr_from_residual(double s);

/// -log(s^2). Returns the stored margin when |margin| > 60, where the
/// exponential round trip would lose the identity.
double margin_of(const SlrrValue& value);

struct Component {
  double theta = 0.0;
  double basis_value = 0.0;  // b(x) for this component
};

struct PartitionResult {
  double total_s2 = 0.0;               // S^2 of the full model margin
  std::vector<double> factor_s2;       // S^2(theta_m b_m), multiplying to total_s2
};

/// Multiplicative residual partition: S^2(sum theta_m b_m) equals the product
/// of the per-component S^2(theta_m b_m).
PartitionResult partition(int y_star, std::span<const Component> components);

/// theta_k b_k / sum_m theta_m b_m, the log-scale share of component k in the
/// squared residual. Errors when the total margin is zero.
double contribution_ratio(int y_star, std::span<const Component> components,
                          std::size_t k);

/// log( S^2(theta_k b_k) / (S^2(f))^{1/M} ): the component contrasted with the
/// geometric mean of all components.
double contribution_vs_geometric_mean(int y_star,
                                      std::span<const Component> components,
                                      std::size_t k);

/// phi evaluated at the margin -log(s^2); the loss as a function of the
/// residual magnitude.
double loss_on_residual_scale(const ConformableLoss& loss, double s_abs);

}  // namespace marginloss
