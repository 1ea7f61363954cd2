#pragma once

#include <cstdint>
#include <vector>

#include "superopt/config.hpp"
#include "superopt/dataset.hpp"
#include "superopt/identify.hpp"
#include "superopt/nuisance.hpp"
#include "superopt/regime.hpp"

namespace superopt {

struct DeltaEstimate {
  std::vector<double> delta;           // [l], floored in magnitude
  std::vector<std::uint8_t> floored;   // [l]
};

/// δ̂(l) = P̂(A=1|Z=1,l) − P̂(A=1|Z=0,l) from the two instrument-stratum fits.
DeltaEstimate estimate_delta(const Dataset& train, const EstimationConfig& cfg);

/// ψ̂₁(a,l) = Σ_z (2z−1)/δ̂(l) · Ê(Y(2A−1)I(A=a) | L=l, Z=z).
Psi1Table estimate_psi1(const Dataset& train, const DeltaEstimate& delta, const EstimationConfig& cfg);

/// Plug-in Ê(Y^a | A=a', l), indexed [l][a'][a]; denominators clipped.
NaturalMeans plugin_natural_means(const NuisanceTables& t, const EstimationConfig& cfg);
/// Plug-in Ê(Y^a | A=a', l, z), contexts indexed l*2+z.
NaturalMeans plugin_lz_natural_means(const NuisanceTables& t, const EstimationConfig& cfg);

/// Regime of the requested kind from fitted nuisances: optimal is
/// argmax ψ̂₁ (ties to 1); superoptimal keeps a' iff Ê(Y|l) ≥ ψ̂₁(1−a',l);
/// the instrument-aware rule maximises the plug-in Ê(Y^a|A=a',l,z)
/// (ties to a').
Regime estimate_regime(const NuisanceTables& t, RegimeKind kind, const EstimationConfig& cfg);

struct RegimeSet {
  Regime optimal = Regime::observed(1);
  Regime superoptimal = Regime::observed(1);
  Regime superoptimal_z = Regime::observed(1);
  std::vector<int> gamma;
  NaturalMeans natural_means;
};

RegimeSet estimate_regimes(const NuisanceTables& t, const EstimationConfig& cfg);

/// V̂(a,l) = [ψ̂₁(1−a,l) − Ê(Y|A=1−a,l) P̂(A=1−a|l)] / P̂(A=a|l), the
/// estimate of E(Y^{1−a} | A=a, l).
double value_override_term(const NuisanceTables& t, int a, std::size_t l, const EstimationConfig& cfg);

/// Per-row terms whose mean is the value estimate:
/// I[A≠g] V̂(A,L) + I[A=g] Ê(Y|A,L), or Y in place of Ê(Y|A,L) for the
/// alternative form. Regimes keyed on Z use the Z-conditional nuisances.
std::vector<double> value_contributions(const Dataset& eval, const Regime& regime,
                                        const NuisanceTables& t, const EstimationConfig& cfg);

double estimate_value(const Dataset& eval, const Regime& regime, const NuisanceTables& t,
                      const EstimationConfig& cfg);

}  // namespace superopt
