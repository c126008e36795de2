#pragma once

#include <functional>

namespace marginloss {

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] to an absolute
/// tolerance. Intervals are bisected while the local Kronrod-Gauss error
/// estimate exceeds the local share of the tolerance; throws QuadratureError
/// if the depth cap is reached before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 48);

}  // namespace marginloss
