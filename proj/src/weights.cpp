#include "marginloss/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "marginloss/errors.hpp"

namespace marginloss {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double w) { return kInvSqrt2Pi * std::exp(-0.5 * w * w); }

void require_positive(double m, const char* what) {
  if (!(m > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}
}  // namespace

WeightFn WeightFn::constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("constant weight must be nonnegative");
  return WeightFn(WeightKind::constant, c, "constant:" + std::to_string(c));
}

WeightFn WeightFn::likelihood() {
  return WeightFn(WeightKind::likelihood, 0.0, "likelihood");
}

WeightFn WeightFn::savage(double scale) {
  require_positive(scale, "savage scale");
  return WeightFn(WeightKind::savage, scale, "savage");
}

WeightFn WeightFn::gaussian_kernel(double m) {
  require_positive(m, "gaussian kernel scale m");
  return WeightFn(WeightKind::gaussian_kernel, m, "gauss:" + std::to_string(m));
}

WeightFn WeightFn::laplace_kernel(double m) {
  require_positive(m, "laplace kernel scale m");
  return WeightFn(WeightKind::laplace_kernel, m, "laplace:" + std::to_string(m));
}

WeightFn WeightFn::buzas2009(double m) {
  require_positive(m, "buzas2009 scale m");
  return WeightFn(WeightKind::buzas2009, m, "buzas2009:" + std::to_string(m));
}

WeightFn WeightFn::custom(Eval g, Evenness evenness, std::optional<Eval> log_derivative,
                          std::string label) {
  if (!g) throw std::invalid_argument("custom weight requires an evaluator");
  WeightFn w(WeightKind::custom, 0.0, std::move(label));
  w.evenness_ = evenness;
  w.custom_eval_ = [g = std::move(g)](const SymmetricCdf&, double x) { return g(x); };
  if (log_derivative) {
    w.custom_log_deriv_ = [d = std::move(*log_derivative)](const SymmetricCdf&, double x) {
      return d(x);
    };
  }
  return w;
}

WeightFn WeightFn::power(const WeightFn& base, double alpha) {
  WeightFn w(WeightKind::custom, 0.0, base.name_ + "^" + std::to_string(alpha));
  w.evenness_ = Evenness::assert_even;  // an even base stays even under powers
  w.custom_eval_ = [base, alpha](const SymmetricCdf& dist, double x) {
    return std::pow(base(dist, x), alpha);
  };
  if (base.has_log_derivative()) {
    w.custom_log_deriv_ = [base, alpha](const SymmetricCdf& dist, double x) {
      return alpha * base.log_derivative(dist, x);
    };
  }
  return w;
}

WeightFn WeightFn::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const bool has_arg = colon != std::string::npos;
  const auto arg = [&]() -> double {
    const std::string tail = spec.substr(colon + 1);
    std::size_t used = 0;
    const double v = std::stod(tail, &used);
    if (used != tail.size()) throw std::invalid_argument("bad weight parameter: " + spec);
    return v;
  };
  if (head == "constant") {
    if (!has_arg) throw std::invalid_argument("constant weight needs a value, e.g. constant:0.5");
    return constant(arg());
  }
  if (head == "likelihood") return likelihood();
  if (head == "savage") return savage();
  if (head == "gauss") {
    if (!has_arg) throw std::invalid_argument("gauss weight needs a scale, e.g. gauss:1");
    return gaussian_kernel(arg());
  }
  if (head == "laplace") {
    if (!has_arg) throw std::invalid_argument("laplace weight needs a scale, e.g. laplace:2");
    return laplace_kernel(arg());
  }
  if (head == "buzas2009") return buzas2009(has_arg ? arg() : 1.0);
  throw std::invalid_argument("unknown weight: " + spec);
}

double WeightFn::eval_raw(const SymmetricCdf& dist, double w) const {
  switch (kind_) {
    case WeightKind::constant:
      if (!dist.contains(w)) throw std::domain_error("argument outside support");
      return param_;
    case WeightKind::likelihood:
      return dist.density(w) / std::sqrt(dist.cdf_complement_product(w));
    case WeightKind::savage: {
      const double p = dist.cdf_complement_product(w);
      return param_ * p * std::sqrt(p);
    }
    case WeightKind::gaussian_kernel: {
      if (!dist.contains(w)) throw std::domain_error("argument outside support");
      const double m = param_;
      return std::exp(-0.5 * w * w / m - 0.125 * m) / std::sqrt(2.0 * M_PI * m);
    }
    case WeightKind::laplace_kernel:
      if (!dist.contains(w)) throw std::domain_error("argument outside support");
      return 0.5 * (param_ + 1.0) * std::exp(-0.5 * param_ * std::abs(w));
    case WeightKind::buzas2009:
      return (1.0 / param_) * normal_pdf(w / param_) /
             std::sqrt(dist.cdf_complement_product(w));
    case WeightKind::custom:
      if (!dist.contains(w)) throw std::domain_error("argument outside support");
      return custom_eval_(dist, w);
  }
  return 0.0;
}

double WeightFn::operator()(const SymmetricCdf& dist, double w) const {
  if (kind_ == WeightKind::custom && evenness_ == Evenness::symmetrize)
    return 0.5 * (eval_raw(dist, w) + eval_raw(dist, -w));
  return eval_raw(dist, w);
}

bool WeightFn::has_log_derivative() const {
  return kind_ != WeightKind::custom || static_cast<bool>(custom_log_deriv_);
}

double WeightFn::log_derivative(const SymmetricCdf& dist, double w) const {
  switch (kind_) {
    case WeightKind::constant:
      if (!dist.contains(w)) throw std::domain_error("argument outside support");
      if (param_ == 0.0) throw std::domain_error("log derivative where g = 0");
      return 0.0;
    case WeightKind::likelihood: {
      const double d = dist.density(w);
      if (d <= 0.0) throw std::domain_error("log derivative where g = 0");
      return dist.density_derivative(w) / d -
             0.5 * d * (1.0 - 2.0 * dist.cdf(w)) / dist.cdf_complement_product(w);
    }
    case WeightKind::savage:
      return 1.5 * dist.density(w) * (1.0 - 2.0 * dist.cdf(w)) /
             dist.cdf_complement_product(w);
    case WeightKind::gaussian_kernel:
      if (!dist.contains(w)) throw std::domain_error("argument outside support");
      return -w / param_;
    case WeightKind::laplace_kernel: {
      if (!dist.contains(w)) throw std::domain_error("argument outside support");
      const double s = (w > 0.0) - (w < 0.0);
      return -0.5 * param_ * s;
    }
    case WeightKind::buzas2009:
      return -w / (param_ * param_) -
             0.5 * dist.density(w) * (1.0 - 2.0 * dist.cdf(w)) /
                 dist.cdf_complement_product(w);
    case WeightKind::custom:
      if (!custom_log_deriv_)
        throw UnsupportedError("custom weight has no log-derivative");
      if (!dist.contains(w)) throw std::domain_error("argument outside support");
      return custom_log_deriv_(dist, w);
  }
  return 0.0;
}

EvennessReport WeightFn::check_even(const SymmetricCdf& dist,
                                    std::span<const double> grid) const {
  EvennessReport report;
  report.even = true;
  for (const double w : grid) {
    const double a = (*this)(dist, w);
    const double b = (*this)(dist, -w);
    const double rel = std::abs(a - b) / (1.0 + std::abs(a));
    report.max_asymmetry = std::max(report.max_asymmetry, rel);
    if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(a))) report.even = false;
  }
  return report;
}

}  // namespace marginloss
