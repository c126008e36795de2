#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "marginloss/dataset.hpp"
#include "marginloss/distributions.hpp"

namespace marginloss {

/// Deterministic random stream: a std::mt19937_64 engine (fully specified by
/// the standard, hence portable) with explicit uniform and normal transforms
/// so the draw sequence does not depend on any library's distribution
/// implementation. Normals use Box-Muller with the spare value cached.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01();                  // [0, 1), 53-bit resolution
  double uniform(double a, double b);  // [a, b)
  double normal();                     // standard normal

  /// splitmix64 of seed^tag: derives independent sub-stream seeds.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class FeatureLaw { standard_gaussian, uniform_pm1, two_cluster };

struct Contamination {
  double label_flip_rate = 0.0;
  double leverage_rate = 0.0;
  double leverage_scale = 1.0;
};

struct GenConfig {
  std::size_t n = 0;
  std::vector<double> beta0;
  FeatureLaw feature_law = FeatureLaw::standard_gaussian;
  SymmetricCdf link = SymmetricCdf::logistic();
  std::optional<Contamination> contamination;
  std::uint64_t seed = 0;

  /// Parses the JSON schema used by the CLI `simulate` command:
  /// {"n":..,"beta0":[..],"feature_law":"standard_gaussian","link":"logistic",
  ///  "seed":..,"contamination":{"label_flip_rate":..,"leverage_rate":..,
  ///  "leverage_scale":..}}
  static GenConfig from_json(const std::string& json_text);
  std::string to_json() const;
};

FeatureLaw parse_feature_law(const std::string& name);
std::string feature_law_name(FeatureLaw law);

/// Draws features from the configured law, labels y* = +1 with probability
/// G(x' beta0) (saturating outside bounded supports), then applies
/// contamination. Features, labels and contamination use three sub-streams
/// derived from the seed with tags 1, 2, 3, so the draws are independent.
Dataset generate(const GenConfig& cfg);

}  // namespace marginloss
