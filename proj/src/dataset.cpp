#include "marginloss/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "marginloss/errors.hpp"

namespace marginloss {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset::Dataset(std::vector<double> x, std::vector<int> y, std::size_t p)
    : x_(std::move(x)), y_(std::move(y)), p_(p) {
  if (y_.empty()) throw std::invalid_argument("empty dataset");
  if (p_ == 0) throw std::invalid_argument("dataset needs at least one feature");
  if (x_.size() != y_.size() * p_)
    throw std::invalid_argument("feature matrix size does not match labels");
  for (const int label : y_)
    if (label != 1 && label != -1)
      throw std::invalid_argument("labels must be +1 or -1");
  for (const double value : x_)
    if (!std::isfinite(value))
      throw std::invalid_argument("non-finite feature value");
}

Dataset Dataset::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split(line, ',');
    break;
  }
  if (header.empty()) throw std::invalid_argument("empty dataset");

  std::size_t label_col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == "y") label_col = j;
  if (label_col == header.size())
    throw std::invalid_argument("no label column named 'y'");
  const std::size_t p = header.size() - 1;
  if (p == 0) throw std::invalid_argument("dataset needs at least one feature");

  std::vector<double> x;
  std::vector<int> y;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size())
      throw std::invalid_argument("row with wrong field count: " + line);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      std::size_t used = 0;
      double value;
      try {
        value = std::stod(fields[j], &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("non-numeric value: " + fields[j]);
      }
      if (used != fields[j].size())
        throw std::invalid_argument("non-numeric value: " + fields[j]);
      if (j == label_col) {
        if (value == 1.0) y.push_back(1);
        else if (value == -1.0 || value == 0.0) y.push_back(-1);
        else throw std::invalid_argument("label must be in {-1,0,1}");
      } else {
        x.push_back(value);
      }
    }
  }
  if (y.empty()) throw std::invalid_argument("empty dataset");
  return Dataset(std::move(x), std::move(y), p);
}

void Dataset::write_csv(const std::string& path, const std::string& comment) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  if (!comment.empty()) out << "# " << comment << "\n";
  for (std::size_t j = 1; j <= p_; ++j) out << "x" << j << ",";
  out << "y\n";
  for (std::size_t i = 0; i < rows(); ++i) {
    for (const double value : row(i)) out << format17(value) << ",";
    out << y_[i] << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace marginloss
