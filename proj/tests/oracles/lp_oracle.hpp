#pragma once

#include <optional>

#include "superopt/bounds.hpp"

namespace superopt::oracle {

enum class Estimand { ate, att0, att1, ey0, ey1 };

/// Bounds by brute force over the vertices of the response-type polytope
/// {q ≥ 0 : Σ_t q_t I[A^z_t = a, Y^a_t = y] = P(y,a|z)}, the 16 types being
/// the joint values of (A^{z=0}, A^{z=1}, Y^{a=0}, Y^{a=1}). Every basic
/// feasible solution is found by solving each 7-column basis, so the result
/// does not rely on any simplex implementation. Returns nullopt when the
/// observed law is incompatible with every type distribution.
std::optional<IntervalBound> lp_oracle_bounds(const TrialCounts& counts, Estimand estimand);

}  // namespace superopt::oracle
