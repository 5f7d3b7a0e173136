#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pparse {

// Raised for malformed input files, invalid trees, bad configuration values.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a training run cannot proceed (e.g. no usable instances).
class TrainError : public std::runtime_error {
 public:
  explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Large negative sentinel used instead of IEEE -inf inside chart sums.
constexpr double kNegInf = -1e18;

inline bool is_finite_score(double v) { return v > kNegInf * 0.5; }

// log(exp(a) + exp(b)) with sentinel-aware handling.
inline double log_add(double a, double b) {
  if (!is_finite_score(a)) return b;
  if (!is_finite_score(b)) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace pparse
