#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "marginloss/errors.hpp"
#include "marginloss/loss.hpp"
#include "marginloss/quadrature.hpp"

using namespace marginloss;

namespace {

std::vector<double> margin_grid(const ConformableLoss& loss) {
  std::vector<double> grid;
  if (loss.dist().bounded_support()) {
    for (int j = 1; j <= 19; ++j) {
      grid.push_back(0.05 * j);
      grid.push_back(-0.05 * j);
    }
  } else {
    for (int j = 1; j <= 40; ++j) {
      grid.push_back(0.25 * j);
      grid.push_back(-0.25 * j);
    }
  }
  return grid;
}

std::vector<ConformableLoss> shipped_losses() {
  std::vector<ConformableLoss> losses;
  for (const char* name : {"exponential", "logistic", "savage", "gaussian:1",
                           "gaussian:4", "laplace:1", "laplace:2", "laplace:5",
                           "squared"})
    losses.push_back(named_loss(name));
  return losses;
}

// Composite Simpson: an integrator independent of the Gauss-Kronrod module.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("adaptive quadrature agrees with an independent Simpson rule") {
  const auto f = [](double x) { return std::exp(-0.5 * x) * std::cos(x); };
  const double gk = integrate(f, 0.0, 3.0, 1e-12);
  const double reference = simpson(f, 0.0, 3.0, 20000);
  CHECK(std::abs(gk - reference) < 1e-10);
}

TEST_CASE("exponential loss closed form") {
  const auto loss = named_loss("exponential");
  CHECK(loss.has_closed_form());
  CHECK(loss.eval(0.0) == 1.0);
  CHECK(loss.eval(2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(loss.derivative(0.0) == -0.5);
  // constructing from (logistic, constant 1/2, k=1) hits the same form
  const auto built = make_loss(SymmetricCdf::logistic(), WeightFn::constant(0.5), 1.0);
  CHECK(built.form() == LossForm::exp_scaled);
  for (const double v : {-3.0, -0.5, 0.25, 4.0})
    CHECK(built.eval(v) == doctest::Approx(std::exp(-0.5 * v)).epsilon(1e-14));
}

TEST_CASE("logistic loss closed form and quadrature antiderivative oracle") {
  const auto loss = make_loss(SymmetricCdf::logistic(), WeightFn::likelihood(), M_LN2);
  CHECK(loss.form() == LossForm::logistic_ll);
  for (const double v : {-6.0, -1.0, 0.0, 0.5, 3.0, 8.0}) {
    const double expected = std::log1p(std::exp(-v));  // hand antiderivative
    CHECK(loss.eval(v) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(std::abs(loss.eval_quadrature(v) - expected) < 1e-9);
  }
  CHECK(loss.derivative(0.0) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("savage loss closed form is (1+e^v)^{-2}") {
  const auto loss = named_loss("savage");
  CHECK(loss.k() == 0.25);
  for (const double v : {-4.0, -1.0, 0.0, 2.0, 6.0}) {
    const double expected = std::pow(1.0 + std::exp(v), -2.0);
    CHECK(loss.eval(v) == doctest::Approx(expected).epsilon(1e-12));
    // derivative oracle: d/dv (1+e^v)^{-2} = -2 e^v (1+e^v)^{-3}
    const double dexp = -2.0 * std::exp(v) * std::pow(1.0 + std::exp(v), -3.0);
    CHECK(loss.derivative(v) == doctest::Approx(dexp).epsilon(1e-12));
  }
}

TEST_CASE("gaussian loss equals the shifted normal tail") {
  const auto normal = SymmetricCdf::gaussian();
  for (const double m : {1.0, 4.0}) {
    const auto loss = named_loss("gaussian:" + std::to_string(m));
    for (const double v : {-6.0, -1.0, 0.0, 0.5, 3.0}) {
      const double expected = normal.cdf(-(v + 0.5 * m) / std::sqrt(m));
      CHECK(std::abs(loss.eval(v) - expected) < 1e-12);
    }
    // derivative: -(1/sqrt m) npdf((v+m/2)/sqrt m)
    const double v = -0.5 * m;  // shifted argument is zero
    CHECK(loss.derivative(v) ==
          doctest::Approx(-normal.density(0.0) / std::sqrt(m)).epsilon(1e-12));
  }
  // spec point: gaussian m=1 at v = -0.5 has derivative -1/sqrt(2 pi)
  CHECK(named_loss("gaussian").derivative(-0.5) ==
        doctest::Approx(-0.3989422804014327).epsilon(1e-12));
}

TEST_CASE("laplace loss branches") {
  const auto loss = named_loss("laplace:2");
  CHECK(loss.eval(0.0) == 1.0);
  // hand oracle for the lower branch at v = -1: 1 + 3(1 - e^{-1/2})
  const double expected = 1.0 + 3.0 * (1.0 - std::exp(-0.5));
  CHECK(loss.eval(-1.0) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(std::abs(loss.eval_quadrature(-1.0) - expected) < 1e-9);
  // upper branch: e^{-3v/2}
  CHECK(loss.eval(2.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
}

TEST_CASE("laplace m=1 lower branch is the linear limit") {
  const auto loss = named_loss("laplace:1");
  for (const double v : {-5.0, -2.0, -0.25, 0.0}) {
    CHECK(loss.eval(v) == 1.0 - v);
    CHECK(std::abs(loss.eval_quadrature(v) - (1.0 - v)) < 1e-9);
  }
  CHECK(loss.eval(1.5) == doctest::Approx(std::exp(-1.5)).epsilon(1e-13));
}

TEST_CASE("squared loss on the uniform distribution") {
  const auto loss = named_loss("squared");
  CHECK(loss.eval(0.0) == 1.0);
  for (const double v : {-0.9, -0.3, 0.4, 0.95})
    CHECK(loss.eval(v) == doctest::Approx((1.0 - v) * (1.0 - v)).epsilon(1e-14));
  CHECK_THROWS_AS(loss.eval(1.0), std::domain_error);
  CHECK_THROWS_AS(loss.derivative(-1.5), std::domain_error);
  // building blocks: the custom weight route reproduces (1-v)^2 by quadrature
  const auto weight = WeightFn::custom(
      [](double w) { return 2.0 * std::sqrt((1.0 + w) * (1.0 - w)); },
      WeightFn::Evenness::assert_even);
  const auto built = make_loss(SymmetricCdf::uniform_pm1(), weight, 1.0);
  CHECK_FALSE(built.has_closed_form());
  for (const double v : {-0.8, -0.2, 0.5, 0.9})
    CHECK(std::abs(built.eval(v) - (1.0 - v) * (1.0 - v)) < 1e-8);
}

TEST_CASE("exp-unit loss is e^{-v} and not conformable to the logistic odds") {
  const auto loss = named_loss("exp-unit");
  CHECK(loss.eval(0.3) == doctest::Approx(std::exp(-0.3)).epsilon(1e-14));
  CHECK(loss.derivative(0.3) == doctest::Approx(-std::exp(-0.3)).epsilon(1e-14));
  CHECK_THROWS_AS(loss.weight_value(0.0), UnsupportedError);
  const auto grid = margin_grid(loss);
  CHECK_FALSE(conformability_check(loss, grid).pass);
}

TEST_CASE("every loss evaluates to k at zero") {
  for (const auto& loss : shipped_losses()) CHECK(loss.eval(0.0) == loss.k());
}

TEST_CASE("closed forms agree with quadrature on the grid") {
  for (const auto& loss : shipped_losses()) {
    for (const double v : margin_grid(loss))
      CHECK(std::abs(loss.eval(v) - loss.eval_quadrature(v)) <= 1e-8);
  }
}

TEST_CASE("derivatives agree with central differences") {
  const double h = 1e-5;
  for (const auto& loss : shipped_losses()) {
    for (const double v : margin_grid(loss)) {
      if (!loss.in_domain(v + h) || !loss.in_domain(v - h)) continue;
      const double fd = (loss.eval(v + h) - loss.eval(v - h)) / (2.0 * h);
      CHECK(std::abs(fd - loss.derivative(v)) < 1e-6);
    }
  }
}

TEST_CASE("losses are nonincreasing") {
  for (const auto& loss : shipped_losses()) {
    auto grid = margin_grid(loss);
    std::sort(grid.begin(), grid.end());
    for (std::size_t i = 1; i < grid.size(); ++i)
      CHECK(loss.eval(grid[i - 1]) >= loss.eval(grid[i]));
  }
}

TEST_CASE("conformability holds for every shipped loss") {
  for (const auto& loss : shipped_losses()) {
    const auto report = conformability_check(loss, margin_grid(loss));
    CHECK(report.pass);
    CHECK(report.max_rel_err <= 1e-8);
    CHECK(report.skipped == 0);
  }
}

TEST_CASE("convexity verdicts") {
  const auto grid = margin_grid(named_loss("exponential"));
  CHECK(convexity_check(named_loss("exponential"), grid).convex);
  CHECK(convexity_check(named_loss("logistic"), grid).convex);
  CHECK(convexity_check(named_loss("exp-unit"), grid).convex);
  CHECK_FALSE(convexity_check(named_loss("savage"), grid).convex);
  CHECK_FALSE(convexity_check(named_loss("gaussian:1"), grid).convex);
  CHECK_FALSE(convexity_check(named_loss("laplace:2"), grid).convex);
  CHECK(convexity_check(named_loss("squared"),
                        margin_grid(named_loss("squared"))).convex);
}

TEST_CASE("cube-rooted savage weight yields a convex loss equal to logistic") {
  const auto rescaled = WeightFn::power(WeightFn::savage(), 1.0 / 3.0);
  const auto loss = make_loss(SymmetricCdf::logistic(), rescaled, M_LN2);
  CHECK_FALSE(loss.has_closed_form());
  const auto grid = margin_grid(loss);
  CHECK(convexity_check(loss, grid).convex);
  const auto logistic = named_loss("logistic");
  const double offset = loss.eval(0.0) - logistic.eval(0.0);
  for (const double v : grid)
    CHECK(std::abs(loss.eval(v) - logistic.eval(v) - offset) <= 1e-8);
}

TEST_CASE("reparameterization with b = sqrt(x(1-x)) and g = G' gives cdf-scale squared error") {
  const auto F = SymmetricCdf::logistic();
  const auto density_weight = WeightFn::custom(
      [F](double w) { return F.density(w); }, WeightFn::Evenness::assert_even);
  const auto loss = reparameterize(
      F, [](double x) { return std::sqrt(x * (1.0 - x)); }, density_weight, 0.125);
  for (const double v : {-4.0, -1.0, 0.0, 0.5, 2.0, 5.0}) {
    const double tail = 1.0 - F.cdf(v);
    CHECK(std::abs(loss.eval(v) - 0.5 * tail * tail) < 1e-8);
  }
}

TEST_CASE("reparameterization with b = 1/sqrt(x(1-x)) turns the density weight into the log-likelihood score") {
  const auto F = SymmetricCdf::logistic();
  const auto g0 = WeightFn::laplace_kernel(2.0);
  const auto composed = WeightFn::custom(
      [F, g0](double w) { return g0(F, w) * F.density(w); },
      WeightFn::Evenness::assert_even);
  const auto loss = reparameterize(
      F, [](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); }, composed, 1.0);
  for (const double v : {-2.0, -0.5, 0.75, 3.0}) {
    const double expected = -g0(F, v) * F.density(v) / F.cdf(v);
    CHECK(loss.derivative(v) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("reparameterization with b = 1 reduces to the plain construction") {
  const auto loss = reparameterize(SymmetricCdf::logistic(), [](double) { return 1.0; },
                                   WeightFn::constant(0.5), 1.0);
  for (const double v : {-2.0, 0.5, 3.0})
    CHECK(std::abs(loss.eval(v) - std::exp(-0.5 * v)) < 1e-9);
}

TEST_CASE("reparameterization rejects asymmetric b") {
  CHECK_THROWS_AS(reparameterize(SymmetricCdf::logistic(),
                                 [](double x) { return x; }, WeightFn::constant(1.0),
                                 1.0),
                  std::invalid_argument);
}

TEST_CASE("make_loss validation") {
  CHECK_THROWS_AS(make_loss(SymmetricCdf::logistic(), WeightFn::constant(0.5), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_loss(SymmetricCdf::logistic(), WeightFn::constant(0.5), -1.0),
                  std::invalid_argument);
  const auto odd = WeightFn::custom([](double w) { return std::exp(w); },
                                    WeightFn::Evenness::assert_even);
  CHECK_THROWS_AS(make_loss(SymmetricCdf::logistic(), odd, 1.0),
                  std::invalid_argument);
  // the symmetrize policy accepts the same evaluator
  const auto fixed = WeightFn::custom([](double w) { return std::exp(w); },
                                      WeightFn::Evenness::symmetrize);
  const auto loss = make_loss(SymmetricCdf::logistic(), fixed, 1.0);
  CHECK(loss.eval(0.0) == 1.0);
}

TEST_CASE("tabulate") {
  const auto exp_loss = named_loss("exponential");
  const auto table = tabulate(exp_loss, -2.0, 2.0, 5);
  REQUIRE(table.grid.size() == 5);
  const std::vector<double> expected = {std::exp(1.0), std::exp(0.5), 1.0,
                                        std::exp(-0.5), std::exp(-1.0)};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(table.grid[i] == doctest::Approx(-2.0 + static_cast<double>(i)));
    CHECK(table.values[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  }

  const auto laplace = named_loss("laplace:2");
  const auto curve = tabulate(laplace, -4.0, 4.0, 161);
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    CHECK(curve.values[i] <= 4.0);  // lower branch is bounded by 1 + (m+1)/(m-1)
    CHECK(std::abs(curve.values[i] - laplace.eval_quadrature(curve.grid[i])) < 1e-8);
    if (i > 0) CHECK(curve.values[i - 1] >= curve.values[i]);
  }

  const auto gaussian = named_loss("gaussian:1");
  const auto bounded = tabulate(gaussian, -6.0, 6.0, 25);
  for (const double value : bounded.values) {
    CHECK(value > 0.0);
    CHECK(value < 1.0);
  }

  CHECK_THROWS_AS(tabulate(exp_loss, 2.0, -2.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(tabulate(exp_loss, 0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(tabulate(named_loss("squared"), -2.0, 0.5, 5), std::domain_error);
}

TEST_CASE("named loss parsing") {
  CHECK(named_loss("gaussian").name() == "gaussian");
  CHECK_THROWS_AS(named_loss("hinge"), std::invalid_argument);
  CHECK_THROWS_AS(named_loss("laplace:0"), std::invalid_argument);
  CHECK_THROWS_AS(named_loss("gaussian:-2"), std::invalid_argument);
}

TEST_CASE("buzas2009 weight builds a conformable quadrature loss") {
  const auto loss = make_loss(SymmetricCdf::logistic(), WeightFn::buzas2009(1.0), 1.0);
  CHECK_FALSE(loss.has_closed_form());
  const auto report = conformability_check(loss, margin_grid(loss));
  CHECK(report.pass);
}

TEST_CASE("likelihood weight under the gaussian cdf is conformable by quadrature") {
  const auto loss = make_loss(SymmetricCdf::gaussian(), WeightFn::likelihood(), 1.0);
  CHECK_FALSE(loss.has_closed_form());
  const auto report = conformability_check(loss, margin_grid(loss));
  CHECK(report.pass);
}
