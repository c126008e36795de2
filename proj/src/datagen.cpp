#include "marginloss/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace marginloss {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1] x [0,1) uniforms; the +1 keeps u1 away from zero.
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed ^ (tag * 0x9e3779b97f4a7c15ULL);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FeatureLaw parse_feature_law(const std::string& name) {
  if (name == "standard_gaussian") return FeatureLaw::standard_gaussian;
  if (name == "uniform_pm1") return FeatureLaw::uniform_pm1;
  if (name == "two_cluster") return FeatureLaw::two_cluster;
  throw std::invalid_argument("unknown feature law: " + name);
}

std::string feature_law_name(FeatureLaw law) {
  switch (law) {
    case FeatureLaw::standard_gaussian: return "standard_gaussian";
    case FeatureLaw::uniform_pm1: return "uniform_pm1";
    case FeatureLaw::two_cluster: return "two_cluster";
  }
  return "?";
}

GenConfig GenConfig::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad generator config: ") + e.what());
  }
  GenConfig cfg;
  try {
    cfg.n = j.at("n").get<std::size_t>();
    cfg.beta0 = j.at("beta0").get<std::vector<double>>();
    cfg.feature_law = parse_feature_law(j.value("feature_law", "standard_gaussian"));
    cfg.link = SymmetricCdf::parse(j.value("link", "logistic"));
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("contamination")) {
      const auto& c = j.at("contamination");
      Contamination contamination;
      contamination.label_flip_rate = c.value("label_flip_rate", 0.0);
      contamination.leverage_rate = c.value("leverage_rate", 0.0);
      contamination.leverage_scale = c.value("leverage_scale", 1.0);
      cfg.contamination = contamination;
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad generator config: ") + e.what());
  }
  return cfg;
}

std::string GenConfig::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["beta0"] = beta0;
  j["feature_law"] = feature_law_name(feature_law);
  j["link"] = link.name();
  j["seed"] = seed;
  if (contamination) {
    j["contamination"] = {{"label_flip_rate", contamination->label_flip_rate},
                          {"leverage_rate", contamination->leverage_rate},
                          {"leverage_scale", contamination->leverage_scale}};
  }
  return j.dump();
}

Dataset generate(const GenConfig& cfg) {
  if (cfg.n == 0) throw std::invalid_argument("generator needs n >= 1");
  if (cfg.beta0.empty()) throw std::invalid_argument("generator needs beta0");
  if (cfg.contamination) {
    const auto& c = *cfg.contamination;
    if (c.label_flip_rate < 0.0 || c.label_flip_rate > 1.0 ||
        c.leverage_rate < 0.0 || c.leverage_rate > 1.0)
      throw std::invalid_argument("contamination rates must lie in [0, 1]");
  }

  const std::size_t p = cfg.beta0.size();
  Rng feature_rng(Rng::derive_seed(cfg.seed, 1));
  Rng label_rng(Rng::derive_seed(cfg.seed, 2));
  Rng contamination_rng(Rng::derive_seed(cfg.seed, 3));

  std::vector<double> x(cfg.n * p);
  std::vector<int> y(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    double f = 0.0;
    for (std::size_t index = 0; index < p; ++index) {
      double value = 0.0;
      switch (cfg.feature_law) {
        case FeatureLaw::standard_gaussian:
          value = feature_rng.normal();
          break;
        case FeatureLaw::uniform_pm1:
          value = feature_rng.uniform(-1.0, 1.0);
          break;
        case FeatureLaw::two_cluster: {
          const double center = feature_rng.uniform01() < 0.5 ? -1.0 : 1.0;
          value = center + feature_rng.normal();
          break;
        }
      }
      x[i * p + index] = value;
      f += value * cfg.beta0[index];
    }
    const double prob = cfg.link.cdf_saturating(f);
    y[i] = label_rng.uniform01() < prob ? 1 : -1;
  }

  if (cfg.contamination) {
    const auto& c = *cfg.contamination;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      if (contamination_rng.uniform01() < c.label_flip_rate) y[i] = -y[i];
      if (contamination_rng.uniform01() < c.leverage_rate)
        for (std::size_t index = 0; index < p; ++index)
          x[i * p + index] *= c.leverage_scale;
    }
  }

  return Dataset(std::move(x), std::move(y), p);
}

}  // namespace marginloss
