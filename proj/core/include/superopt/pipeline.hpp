#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "superopt/bootstrap.hpp"
#include "superopt/config.hpp"
#include "superopt/dataset.hpp"
#include "superopt/estimate.hpp"
#include "superopt/nuisance.hpp"

namespace superopt {

struct SplitData {
  Dataset train;
  Dataset eval;
};

/// Seeded random partition: the first round(fraction·n) rows of a
/// permutation train, the rest evaluate. fraction = 1 returns the full data
/// on both sides.
SplitData split_dataset(const Dataset& data, double fraction, std::uint64_t seed);

/// Regimes in the order of the Table-1 style report.
inline constexpr const char* kReportRegimes[] = {"observed", "optimal_L", "superoptimal_LA",
                                                 "superoptimal_LAZ"};

struct FitResult {
  EstimationConfig config;
  std::uint64_t fingerprint = 0;
  std::size_t n_rows = 0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  NuisanceSet train_nuisances;
  RegimeSet regimes;
  std::vector<std::size_t> support;  // training rows per context
  ValueBootstrap values;             // kReportRegimes order
  std::vector<std::string> warnings;
};

/// Learns the optimal, superoptimal and instrument-aware superoptimal
/// regimes on the training split, then values them and the factual regime
/// on the evaluation split with bootstrap intervals, nuisances refitted on
/// that split.
FitResult fit_pipeline(const Dataset& data, const EstimationConfig& cfg);

}  // namespace superopt
