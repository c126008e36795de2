#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace marginloss {

/// Labeled feature rows: x is row-major n x p, labels are +/-1.
class Dataset {
 public:
  Dataset(std::vector<double> x, std::vector<int> y, std::size_t p);

  std::size_t rows() const { return y_.size(); }
  std::size_t cols() const { return p_; }

  std::span<const double> row(std::size_t i) const {
    return {x_.data() + i * p_, p_};
  }
  int label(std::size_t i) const { return y_[i]; }

  std::span<const double> features() const { return x_; }
  std::span<const int> labels() const { return y_; }

  /// Reads a CSV with a header row. The column named "y" holds labels in
  /// {-1,1} or {0,1} (0 maps to -1); every other column is a numeric feature.
  /// Lines starting with '#' are skipped.
  static Dataset read_csv(const std::string& path);

  /// Writes header x1..xp,y and one row per observation at 17 significant
  /// digits. An optional comment line is emitted first.
  void write_csv(const std::string& path, const std::string& comment = "") const;

 private:
  std::vector<double> x_;
  std::vector<int> y_;
  std::size_t p_;
};

}  // namespace marginloss
