#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace superopt {

/// Input that violates a declared contract (bad CSV, bad flags, schema
/// mismatch). The CLI maps these to exit status 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity is not identified or a positivity/relevance condition fails
/// at some context.
class IdentificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, too many dropped bootstrap
/// replicates, infeasible linear program. The CLI maps these to exit 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntervalBound {
  double lo = 0.0;
  double hi = 0.0;

  IntervalBound() = default;
  IntervalBound(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo_ <= hi_)) {
      throw std::invalid_argument("IntervalBound requires lo <= hi");
    }
  }

  double width() const { return hi - lo; }
  bool contains(double x, double tol = 0.0) const {
    return x >= lo - tol && x <= hi + tol;
  }
};

inline bool is_binary(int v) { return v == 0 || v == 1; }

}  // namespace superopt

namespace superopt {

/// Two conditional means closer than this are treated as tied when a
/// regime takes an argmax.
inline constexpr double kTieTolerance = 1e-10;

/// argmax over a ∈ {0,1} of (v0, v1); `preferred` wins ties.
inline int argmax_binary(double v0, double v1, int preferred) {
  const double d = v1 - v0;
  if (d <= kTieTolerance && d >= -kTieTolerance) return preferred;
  return d > 0 ? 1 : 0;
}

}  // namespace superopt
