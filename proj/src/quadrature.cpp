#include "marginloss/quadrature.hpp"

#include <array>
#include <cmath>

#include "marginloss/errors.hpp"

namespace marginloss {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Odd-indexed nodes are the Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel {
  double kronrod;
  double error;
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);

  const double fc = f(mid);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol,
             int depth) {
  const Panel panel = gauss_kronrod(f, a, b);
  if (panel.error <= tol || panel.error == 0.0) return panel.kronrod;
  if (depth <= 0)
    throw QuadratureError("quadrature tolerance unmet after maximum refinement");
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * tol, depth - 1) +
         adapt(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, abs_tol, max_depth);
  return adapt(f, a, b, abs_tol, max_depth);
}

}  // namespace marginloss
