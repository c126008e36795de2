#include "marginloss/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "marginloss/datagen.hpp"

namespace marginloss {

namespace {

constexpr double kDivergenceThreshold = 1e4;
// Rows per reduction block. Partial sums are always combined in block order,
// so results are bitwise identical for every thread count.
constexpr std::size_t kBlockRows = 4096;

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Runs fn(block_index, row_begin, row_end) over fixed-size row blocks,
/// possibly on several threads.
void for_blocks(std::size_t n, int threads,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t n_blocks = (n + kBlockRows - 1) / kBlockRows;
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n_blocks)));
  if (workers == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b)
      fn(b, b * kBlockRows, std::min(n, (b + 1) * kBlockRows));
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t b = static_cast<std::size_t>(t); b < n_blocks;
           b += static_cast<std::size_t>(workers))
        fn(b, b * kBlockRows, std::min(n, (b + 1) * kBlockRows));
    });
  }
  for (auto& th : pool) th.join();
}

/// A margin-based objective over a prebuilt design matrix.
struct MarginProblem {
  std::vector<double> design;  // n x dim row-major
  std::vector<int> labels;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  int threads = 1;

  double margin(std::size_t i, std::span<const double> beta) const {
    const double* row = design.data() + i * dim;
    double f = 0.0;
    for (std::size_t j = 0; j < dim; ++j) f += row[j] * beta[j];
    return static_cast<double>(labels[i]) * f;
  }

  // Mean loss over rows; block-deterministic reduction.
  double risk(std::span<const double> beta) const {
    const std::size_t n_blocks = (n + kBlockRows - 1) / kBlockRows;
    std::vector<double> partial(n_blocks, 0.0);
    for_blocks(n, threads, [&](std::size_t b, std::size_t lo, std::size_t hi) {
      double sum = 0.0;
      for (std::size_t i = lo; i < hi; ++i) sum += phi(margin(i, beta));
      partial[b] = sum;
    });
    double total = 0.0;
    for (const double s : partial) total += s;
    return total / static_cast<double>(n);
  }

  struct GradientInfo {
    std::vector<double> gradient;
    double min_margin = 0.0;
  };

  GradientInfo gradient(std::span<const double> beta) const {
    const std::size_t n_blocks = (n + kBlockRows - 1) / kBlockRows;
    std::vector<double> partial(n_blocks * dim, 0.0);
    std::vector<double> block_min(n_blocks, 0.0);
    for_blocks(n, threads, [&](std::size_t b, std::size_t lo, std::size_t hi) {
      double* out = partial.data() + b * dim;
      double mn = std::numeric_limits<double>::infinity();
      for (std::size_t i = lo; i < hi; ++i) {
        const double v = margin(i, beta);
        mn = std::min(mn, v);
        const double scale = dphi(v) * static_cast<double>(labels[i]);
        const double* row = design.data() + i * dim;
        for (std::size_t j = 0; j < dim; ++j) out[j] += scale * row[j];
      }
      block_min[b] = mn;
    });
    GradientInfo info;
    info.gradient.assign(dim, 0.0);
    info.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n_blocks; ++b) {
      for (std::size_t j = 0; j < dim; ++j) info.gradient[j] += partial[b * dim + j];
      info.min_margin = std::min(info.min_margin, block_min[b]);
    }
    for (double& g : info.gradient) g /= static_cast<double>(n);
    return info;
  }
};

MarginProblem build_problem(const ModelSpec& spec, const Dataset& data,
                            std::function<double(double)> phi,
                            std::function<double(double)> dphi, int threads) {
  if (spec.feature_dim() != data.cols())
    throw std::invalid_argument("model feature dimension does not match dataset");
  MarginProblem problem;
  problem.n = data.rows();
  problem.dim = spec.dimension();
  problem.design.resize(problem.n * problem.dim);
  problem.labels.assign(data.labels().begin(), data.labels().end());
  for (std::size_t i = 0; i < problem.n; ++i)
    spec.design_row(data.row(i), {problem.design.data() + i * problem.dim, problem.dim});
  problem.phi = std::move(phi);
  problem.dphi = std::move(dphi);
  problem.threads = threads;
  return problem;
}

FitResult minimize(const MarginProblem& problem, std::span<const double> start,
                   const FitOptions& options) {
  FitResult result;
  result.beta.assign(start.begin(), start.end());
  double risk = problem.risk(result.beta);
  if (!std::isfinite(risk)) throw std::runtime_error("non-finite risk at start");

  double prev_step = 1.0;
  // Near the optimum the true per-step decrease drops below one ulp of the
  // computed risk, so value comparisons saturate while the directly computed
  // gradient is still accurate. A bounded number of pure gradient steps then
  // finishes the descent on gradient information alone.
  int polish_budget = 500;
  double last_gnorm = std::numeric_limits<double>::infinity();
  bool gnorm_rose = false;

  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const auto info = problem.gradient(result.beta);
    const double gnorm = inf_norm(info.gradient);
    result.gradient_norm = gnorm;
    if (inf_norm(result.beta) > kDivergenceThreshold) {
      result.status = FitStatus::diverged_separable;
      break;
    }
    if (gnorm <= options.tolerance) {
      // A vanished gradient with every margin positive means the monotone
      // loss flattened out on separated data: no finite minimizer exists.
      result.status = info.min_margin > 0.0 ? FitStatus::diverged_separable
                                            : FitStatus::converged;
      break;
    }

    double g2 = 0.0;
    for (const double g : info.gradient) g2 += g * g;

    // The trial step doubles from the last accepted one but never starts
    // below 1.0: a collapsed step would move beta by less than one ulp, and
    // the resulting zero-progress trials must not be accepted (hence the
    // strict decrease below) or the search pins itself in place.
    double step = std::clamp(2.0 * prev_step, 1.0, 1e12);
    bool accepted = false;
    std::vector<double> trial(result.beta.size());
    double trial_risk = 0.0;
    for (int halvings = 0; halvings < 200; ++halvings) {
      for (std::size_t j = 0; j < trial.size(); ++j)
        trial[j] = result.beta[j] - step * info.gradient[j];
      trial_risk = problem.risk(trial);
      if (std::isfinite(trial_risk) && trial_risk < risk &&
          trial_risk <= risk - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (accepted) {
      result.beta = trial;
      risk = trial_risk;
      prev_step = step;
      last_gnorm = std::numeric_limits<double>::infinity();
      gnorm_rose = false;
      continue;
    }

    // Value floor reached: take a plain gradient step, shrinking it whenever
    // the gradient norm rises twice in a row.
    if (polish_budget-- <= 0) {
      result.status = FitStatus::max_iterations;
      break;
    }
    if (gnorm > last_gnorm) {
      if (gnorm_rose) prev_step = std::max(0.5 * prev_step, 1e-6);
      gnorm_rose = true;
    } else {
      gnorm_rose = false;
    }
    last_gnorm = gnorm;
    const double polish_step = std::min(prev_step, 1e3);
    for (std::size_t j = 0; j < result.beta.size(); ++j)
      result.beta[j] -= polish_step * info.gradient[j];
    risk = problem.risk(result.beta);
  }
  if (iter == options.max_iterations) result.status = FitStatus::max_iterations;
  result.iterations = iter;
  result.final_risk = risk;
  return result;
}

FitResult minimize_with_restarts(const MarginProblem& problem, const FitOptions& options) {
  if (problem.n == 0) throw std::invalid_argument("empty dataset");
  const std::size_t starts = std::max<std::size_t>(1, options.restarts);
  Rng rng(Rng::derive_seed(options.seed, 0xF17));

  FitResult best;
  bool have_best = false;
  for (std::size_t r = 0; r < starts; ++r) {
    std::vector<double> start(problem.dim, 0.0);
    if (r > 0)
      for (double& b : start) b = rng.uniform(-1.0, 1.0);
    FitResult candidate = minimize(problem, start, options);
    if (!have_best || candidate.final_risk < best.final_risk) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  return best;
}

}  // namespace

std::string fit_status_name(FitStatus status) {
  switch (status) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::diverged_separable: return "diverged_separable";
  }
  return "?";
}

FitStatus parse_fit_status(const std::string& name) {
  if (name == "converged") return FitStatus::converged;
  if (name == "max_iterations") return FitStatus::max_iterations;
  if (name == "diverged_separable") return FitStatus::diverged_separable;
  throw std::invalid_argument("unknown fit status: " + name);
}

ModelSpec::ModelSpec(std::size_t p, bool linear, std::vector<BasisFn> bases,
                     bool intercept)
    : p_(p), linear_(linear), intercept_(intercept), bases_(std::move(bases)) {
  if (p_ == 0) throw std::invalid_argument("model needs at least one feature");
  if (!linear_ && bases_.empty())
    throw std::invalid_argument("basis expansion needs at least one basis function");
}

ModelSpec ModelSpec::linear(std::size_t p, bool intercept) {
  return ModelSpec(p, true, {}, intercept);
}

ModelSpec ModelSpec::basis_expansion(std::size_t p, std::vector<BasisFn> bases,
                                     bool intercept) {
  return ModelSpec(p, false, std::move(bases), intercept);
}

void ModelSpec::design_row(std::span<const double> x, std::span<double> out) const {
  if (x.size() != p_) throw std::invalid_argument("feature row has wrong dimension");
  if (out.size() != dimension()) throw std::invalid_argument("design row has wrong dimension");
  std::size_t j = 0;
  if (intercept_) out[j++] = 1.0;
  if (linear_) {
    for (const double value : x) out[j++] = value;
  } else {
    for (const auto& basis : bases_) {
      const double value = basis(x);
      if (!std::isfinite(value))
        throw std::invalid_argument("basis function produced a non-finite value");
      out[j++] = value;
    }
  }
}

std::vector<double> ModelSpec::design_row(std::span<const double> x) const {
  std::vector<double> out(dimension());
  design_row(x, out);
  return out;
}

double empirical_risk(const ConformableLoss& loss, const ModelSpec& spec,
                      std::span<const double> beta, const Dataset& data, int threads) {
  if (beta.size() != spec.dimension())
    throw std::invalid_argument("beta dimension does not match model");
  const auto problem = build_problem(
      spec, data, [&loss](double v) { return loss.eval(v); },
      [&loss](double v) { return loss.derivative(v); }, threads);
  return problem.risk(beta);
}

std::vector<double> risk_gradient(const ConformableLoss& loss, const ModelSpec& spec,
                                  std::span<const double> beta, const Dataset& data,
                                  int threads) {
  if (beta.size() != spec.dimension())
    throw std::invalid_argument("beta dimension does not match model");
  const auto problem = build_problem(
      spec, data, [&loss](double v) { return loss.eval(v); },
      [&loss](double v) { return loss.derivative(v); }, threads);
  return problem.gradient(beta).gradient;
}

FitResult fit(const ConformableLoss& loss, const ModelSpec& spec, const Dataset& data,
              const FitOptions& options) {
  const auto problem = build_problem(
      spec, data, [&loss](double v) { return loss.eval(v); },
      [&loss](double v) { return loss.derivative(v); }, options.threads);
  return minimize_with_restarts(problem, options);
}

std::vector<double> score_at(const ConformableLoss& loss, const ModelSpec& spec,
                             std::span<const double> beta, std::span<const double> x,
                             int y_star) {
  if (y_star != 1 && y_star != -1) throw std::invalid_argument("label must be +1 or -1");
  if (beta.size() != spec.dimension())
    throw std::invalid_argument("beta dimension does not match model");
  const auto d = spec.design_row(x);
  double f = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) f += d[j] * beta[j];
  const double scale = loss.derivative(static_cast<double>(y_star) * f) *
                       static_cast<double>(y_star);
  std::vector<double> score(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) score[j] = scale * d[j];
  return score;
}

namespace {
std::vector<double> scaled_outer(std::span<const double> d, double scale) {
  std::vector<double> m(d.size() * d.size());
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b) m[a * d.size() + b] = scale * d[a] * d[b];
  return m;
}
}  // namespace

std::vector<double> score_variance(const ConformableLoss& loss, const ModelSpec& spec,
                                   std::span<const double> beta,
                                   std::span<const double> x) {
  if (beta.size() != spec.dimension())
    throw std::invalid_argument("beta dimension does not match model");
  const auto d = spec.design_row(x);
  double f = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) f += d[j] * beta[j];
  const double g = loss.weight_value(f);
  return scaled_outer(d, g * g);
}

std::vector<double> score_sensitivity(const ConformableLoss& loss, const ModelSpec& spec,
                                      std::span<const double> beta,
                                      std::span<const double> x) {
  if (beta.size() != spec.dimension())
    throw std::invalid_argument("beta dimension does not match model");
  const auto d = spec.design_row(x);
  double f = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) f += d[j] * beta[j];
  const SymmetricCdf& dist = loss.dist();
  const double scale = dist.density(f) * loss.weight_value(f) /
                       std::sqrt(dist.cdf_complement_product(f));
  return scaled_outer(d, scale);
}

FitResult pnorm_fit(const ModelSpec& spec, const Dataset& data, double p,
                    const FitOptions& options) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  const auto problem = build_problem(
      spec, data, [p](double v) { return std::exp(-0.5 * p * v); },
      [p](double v) { return -0.5 * p * std::exp(-0.5 * p * v); }, options.threads);
  return minimize_with_restarts(problem, options);
}

double pnorm_objective(const ModelSpec& spec, std::span<const double> beta,
                       const Dataset& data, double p, int threads) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  if (beta.size() != spec.dimension())
    throw std::invalid_argument("beta dimension does not match model");
  const auto problem = build_problem(
      spec, data, [p](double v) { return std::exp(-0.5 * p * v); },
      [p](double v) { return -0.5 * p * std::exp(-0.5 * p * v); }, threads);
  return problem.risk(beta) * static_cast<double>(data.rows());
}

double predict(const ModelSpec& spec, std::span<const double> beta,
               std::span<const double> x) {
  if (beta.size() != spec.dimension())
    throw std::invalid_argument("beta dimension does not match model");
  const auto d = spec.design_row(x);
  double f = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) f += d[j] * beta[j];
  return f;
}

Classification classify(const ModelSpec& spec, std::span<const double> beta,
                        std::span<const double> x) {
  const double f = predict(spec, beta, x);
  Classification c;
  c.degenerate = f == 0.0;
  c.label = f >= 0.0 ? 1 : -1;
  return c;
}

double soft_probability(const ModelSpec& spec, std::span<const double> beta,
                        std::span<const double> x) {
  return SymmetricCdf::logistic().cdf(predict(spec, beta, x));
}

double g_probability(const SymmetricCdf& dist, double f) {
  return dist.cdf_saturating(f);
}

double exp_empirical_risk(const ModelSpec& spec, std::span<const double> beta,
                          const Dataset& data, int threads) {
  if (beta.size() != spec.dimension())
    throw std::invalid_argument("beta dimension does not match model");
  const auto problem = build_problem(
      spec, data, [](double v) { return std::exp(-v); },
      [](double v) { return -std::exp(-v); }, threads);
  return problem.risk(beta);
}

}  // namespace marginloss
