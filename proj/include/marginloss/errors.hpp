#pragma once

#include <stdexcept>

namespace marginloss {

/// Thrown when a requested capability is absent, e.g. the log-derivative of a
/// custom weight that did not supply one.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when adaptive quadrature cannot meet its tolerance within the
/// refinement depth cap.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown on file read/write failures; the CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace marginloss
