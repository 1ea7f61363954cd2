#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superopt/config.hpp"
#include "superopt/dataset.hpp"
#include "superopt/regime.hpp"
#include "superopt/types.hpp"

namespace superopt {

/// Statistics of one resampled dataset. Throwing IdentificationError marks
/// the draw as degenerate, which triggers a redraw.
using Statistic = std::function<std::vector<double>(const Dataset&)>;

struct ReplicateSet {
  std::vector<std::vector<double>> values;  // [replicate][statistic], kept replicates only
  std::size_t dropped = 0;
  std::size_t redraws = 0;
};

/// Draws `reps` resamples with replacement. Replicate b uses the stream
/// derive_seed(seed, b), so results do not depend on the thread count. A
/// draw that empties an (l, z) cell occupied in `data`, or on which the
/// statistic throws IdentificationError, is redrawn up to 10 times and then
/// dropped. Dropping more than 1% of replicates raises NumericalError.
ReplicateSet bootstrap_replicates(const Dataset& data, std::size_t reps, std::uint64_t seed,
                                  unsigned threads, const Statistic& stat);

/// Type-7 quantile of unsorted values.
double quantile(std::vector<double> values, double p);

/// Percentile interval [q(α/2), q(1−α/2)] with level 1−α, optionally
/// truncated to [lower, upper].
IntervalBound percentile_interval(std::span<const double> values, double level = 0.95,
                                  std::optional<double> lower = std::nullopt,
                                  std::optional<double> upper = std::nullopt);

struct ValueInterval {
  double estimate = 0.0;
  IntervalBound ci;
  bool widened = false;  // CI stretched to include the point estimate
  bool clamped = false;  // point estimate clamped to the outcome range
};

struct ValueBootstrap {
  std::vector<ValueInterval> values;  // one per regime
  std::size_t reps = 0;
  std::size_t dropped = 0;
  std::vector<std::string> warnings;
};

/// Values of fixed regimes on `data` with percentile intervals. Each
/// replicate refits the nuisances on the resample and re-evaluates every
/// regime; the regimes themselves never change. For binary outcomes the
/// point estimate and interval are truncated to [0,1].
ValueBootstrap bootstrap_ci(const Dataset& data, std::span<const Regime> regimes,
                            const EstimationConfig& cfg);

}  // namespace superopt
