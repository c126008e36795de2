#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "marginloss/datagen.hpp"
#include "marginloss/residuals.hpp"

using namespace marginloss;

TEST_CASE("slrr basic values") {
  CHECK(slrr(1, 0.0).s == 1.0);
  const auto value = slrr(-1, 2.0);
  CHECK(value.s == doctest::Approx(-std::exp(1.0)).epsilon(1e-14));
  CHECK(margin_of(value) == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK_THROWS_AS(slrr(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(slrr(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(slrr(1, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("slrr equals the definitional standardized residual") {
  const auto F = SymmetricCdf::logistic();
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const double f = rng.uniform(-30.0, 30.0);
    const int y_star = rng.uniform01() < 0.5 ? -1 : 1;
    // (y - F(f))/sqrt(F(f)(1-F(f))) with the complement taken as F(-f), the
    // cancellation-free form of the same expression.
    const double prob = F.cdf(f);
    const double comp = F.cdf(-f);
    const double definitional =
        y_star == 1 ? std::sqrt(comp / prob) : -std::sqrt(prob / comp);
    const double direct = slrr(y_star, f).s;
    CHECK(std::abs(direct - definitional) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("margin identity round trip on seeded pairs") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const double f = rng.uniform(-30.0, 30.0);
    const int y_star = rng.uniform01() < 0.5 ? -1 : 1;
    const double margin = static_cast<double>(y_star) * f;
    CHECK(std::abs(margin_of(slrr(y_star, f)) - margin) < 1e-12);
  }
}

TEST_CASE("sign and reciprocal law") {
  for (const double f : {0.5, 1.0, 3.0}) {
    const double s_pos = slrr(1, f).s;
    const double s_neg_flip = slrr(-1, -f).s;
    CHECK(s_pos == doctest::Approx(-s_neg_flip).epsilon(1e-14));
    CHECK(std::abs(s_pos * slrr(-1, f).s + 1.0) < 1e-12);
  }
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double f = rng.uniform(-30.0, 30.0);
    CHECK(std::abs(slrr(1, f).s * slrr(-1, f).s + 1.0) < 1e-12);
  }
}

TEST_CASE("log-space margins survive |f| > 60") {
  const auto value = slrr(1, 200.0);
  CHECK(margin_of(value) == 200.0);
  CHECK(std::abs(slrr(-1, 1000.0).margin + 1000.0) == 0.0);
}

TEST_CASE("residual wrapper") {
  CHECK(margin_of(slrr_from_residual(1.0)) == 0.0);
  CHECK(margin_of(slrr_from_residual(-std::exp(1.0))) ==
        doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(margin_of(slrr_from_residual(0.1)) ==
        doctest::Approx(std::log(100.0)).epsilon(1e-13));
  CHECK(slrr_from_residual(-0.5).y_star == -1);
  CHECK_THROWS_AS(slrr_from_residual(0.0), std::domain_error);
}

TEST_CASE("partition identities") {
  // cancelling margins
  const std::vector<Component> cancel = {{1.0, 0.5}, {1.0, -0.5}};
  const auto zero = partition(1, cancel);
  CHECK(zero.total_s2 == 1.0);
  CHECK(zero.factor_s2[0] * zero.factor_s2[1] == doctest::Approx(1.0).epsilon(1e-14));

  // hand computation: y* = -1, pieces 2 and 1 -> S^2 factors e^2, e^1
  const std::vector<Component> hand = {{2.0, 1.0}, {1.0, 1.0}};
  const auto res = partition(-1, hand);
  CHECK(res.total_s2 == doctest::Approx(std::exp(3.0)).epsilon(1e-13));
  CHECK(res.factor_s2[0] == doctest::Approx(std::exp(2.0)).epsilon(1e-13));
  CHECK(res.factor_s2[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-13));

  // degenerate single component
  const std::vector<Component> single = {{0.7, -1.3}};
  const auto one = partition(1, single);
  CHECK(one.total_s2 == one.factor_s2[0]);

  CHECK_THROWS_AS(partition(1, std::vector<Component>{}), std::invalid_argument);
}

TEST_CASE("partition holds for random component sets") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform01() * 7);
    std::vector<Component> components;
    for (std::size_t j = 0; j < m; ++j)
      components.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
    const int y_star = rng.uniform01() < 0.5 ? -1 : 1;
    const auto result = partition(y_star, components);
    double product = 1.0;
    for (const double factor : result.factor_s2) product *= factor;
    CHECK(std::abs(product - result.total_s2) <= 1e-10 * std::abs(result.total_s2));
  }
}

TEST_CASE("contribution ratios") {
  const std::vector<Component> equal = {{1.0, 1.0}, {1.0, 1.0}};
  CHECK(contribution_ratio(1, equal, 0) == 0.5);
  const std::vector<Component> skewed = {{3.0, 1.0}, {1.0, 1.0}};
  CHECK(contribution_ratio(1, skewed, 0) == 0.75);
  const std::vector<Component> degenerate = {{1.0, 1.0}, {1.0, -1.0}};
  CHECK_THROWS_AS(contribution_ratio(1, degenerate, 0), std::domain_error);
  // ratio equals the log-S^2 share computed directly
  const std::vector<Component> mixed = {{0.7, 1.2}, {-0.4, 0.9}, {1.1, -0.3}};
  const auto parts = partition(-1, mixed);
  const double direct = std::log(parts.factor_s2[1]) / std::log(parts.total_s2);
  CHECK(contribution_ratio(-1, mixed, 1) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("geometric-mean contrast matches the direct log ratio") {
  Rng rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Component> components;
    const std::size_t m = 3 + trial;
    for (std::size_t j = 0; j < m; ++j)
      components.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
    const int y_star = trial % 2 == 0 ? 1 : -1;
    const auto parts = partition(y_star, components);
    for (std::size_t j = 0; j < m; ++j) {
      const double direct = std::log(
          parts.factor_s2[j] /
          std::pow(parts.total_s2, 1.0 / static_cast<double>(m)));
      CHECK(contribution_vs_geometric_mean(y_star, components, j) ==
            doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("loss on the residual scale") {
  const auto laplace = named_loss("laplace:2");
  CHECK(loss_on_residual_scale(laplace, 1.0) == 1.0);  // branch junction
  CHECK(loss_on_residual_scale(laplace, 0.5) ==
        doctest::Approx(0.125).epsilon(1e-13));  // |S|^{m+1}
  // |S| >= 1 branch: 1 + 3 (1 - 1/|S|)
  CHECK(loss_on_residual_scale(laplace, 2.0) ==
        doctest::Approx(1.0 + 3.0 * (1.0 - 0.5)).epsilon(1e-13));

  const auto exp_unit = named_loss("exp-unit");
  for (const double s : {0.3, 1.0, 2.0})
    CHECK(loss_on_residual_scale(exp_unit, s) ==
          doctest::Approx(s * s).epsilon(1e-13));

  CHECK_THROWS_AS(loss_on_residual_scale(laplace, 0.0), std::domain_error);
  CHECK_THROWS_AS(loss_on_residual_scale(laplace, -1.0), std::domain_error);
  // squared loss domain: |margin| < 1 requires |S| in (e^{-1/2}, e^{1/2})
  CHECK_THROWS_AS(loss_on_residual_scale(named_loss("squared"), 2.0),
                  std::domain_error);
}

TEST_CASE("laplace losses approach 0-1 loss in the residual scale") {
  const auto sharp = named_loss("laplace:100");
  CHECK(loss_on_residual_scale(sharp, 0.5) < 0.01);
  CHECK(std::abs(loss_on_residual_scale(sharp, 2.0) - 2.0) < 0.05);
}

TEST_CASE("logistic loss is the log geometric mean of shifted squared residuals") {
  const auto logistic_loss = named_loss("logistic");
  Rng rng(13);
  const int n = 400;
  double lhs = 0.0;
  double rhs = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = rng.uniform(-10.0, 10.0);
    const int y_star = rng.uniform01() < 0.5 ? -1 : 1;
    lhs += logistic_loss.eval(static_cast<double>(y_star) * f);
    const double s = slrr(y_star, f).s;
    rhs += std::log1p(s * s);
  }
  CHECK(std::abs(lhs / n - rhs / n) < 1e-12);
}
