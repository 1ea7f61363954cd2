#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "superopt/types.hpp"

namespace superopt {

/// Cell counts n[y][a][z] of a binary-instrument trial with binary
/// treatment and outcome.
struct TrialCounts {
  std::array<std::array<std::array<std::uint64_t, 2>, 2>, 2> n{};

  std::uint64_t total() const;
  std::uint64_t arm_total(int z) const;
  /// P(Y=y, A=a | Z=z).
  double q(int y, int a, int z) const;
  /// Throws ValidationError when the table is empty or a z arm is empty.
  void validate() const;
};

/// CSV with header y,a,z,count (any column order). Repeated cells add up.
TrialCounts read_trial_counts(std::istream& in);
TrialCounts load_trial_counts(const std::string& path);

/// max_a Σ_y max_z P(Y=y,A=a|Z=z) ≤ 1: the observed law is compatible with
/// some distribution over compliance/outcome response types.
bool satisfies_instrumental_inequality(const TrialCounts& counts, double tol = 1e-12);

/// Sharp bounds on E(Y^1 − Y^0) under randomisation of Z and exclusion.
IntervalBound balke_pearl_ate_bounds(const TrialCounts& counts);

/// Sharp bounds on E(Y^a).
IntervalBound potential_outcome_bounds(const TrialCounts& counts, int a);

/// Bounds on E(Y^1 − Y^0 | A=a'), taking the natural value A to be the
/// treatment taken in the pooled sample, so P(Z=z) is the arm share n_z/n.
/// Under one-sided compliance (P(A=1|Z=0) = 0) the a'=1 stratum is point
/// identified.
IntervalBound natural_att_bounds(const TrialCounts& counts, int a_prime);

}  // namespace superopt
