#pragma once

#include <cmath>
#include <cstddef>

#include "superopt/dataset.hpp"
#include "superopt/nuisance.hpp"
#include "superopt/regime.hpp"

namespace superopt {

/// Influence function of ψ₁(a,l) evaluated at one observation. With
/// s = 2Z−1 and R = (2A−1) Y I(A=a) it equals
///   I(L=l)/P(l) · s / (δ(l) f(Z|l)) · [R − m_Z(l) − ψ₁(a,l)(A − P(A=1|Z,l))],
/// written term by term in the instrument's ±1 coding.
double eif_psi1(const Observation& row, const NuisanceTables& t, int a, std::size_t l);

/// Ψ(a,l) = E(Y^a | A=1−a, L=l) = [ψ₁(a,l) − E(Y|A=a,l) P(A=a|l)] / P(A=1−a|l).
double plugin_Psi(const NuisanceTables& t, int a, std::size_t l);

/// Influence function of Ψ(a,l), by the quotient rule over ψ₁(a,l),
/// E(Y|A=a,l) P(A=a|l) and P(A=1−a|l).
double eif_Psi(const Observation& row, const NuisanceTables& t, int a, std::size_t l);

/// Influence function of E(Y^g) for a regime keyed on (A, L), summing over
/// cells (a,l): the factual residual where g keeps a, P(a,l)·Ψ^eff(1−a,l)
/// where g overrides it, and the cell-mass term.
double eif_value(const Observation& row, const Regime& regime, const NuisanceTables& t);

/// Plug-in Ψ̂(a,l) plus the empirical mean of its influence function.
double one_step_Psi(const Dataset& sample, const NuisanceTables& t, int a, std::size_t l);

/// One-step estimate of E(Y|L=l) − E(Y^a|L=l):
/// Ê(Y|l) − ψ̂₁ + P_n[I(L=l)/P̂(l) (Y − Ê(Y|l)) − ψ̂₁^eff].
double one_step_contrast(const Dataset& sample, const NuisanceTables& t, int a, std::size_t l);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and standard error of an influence function over a dataset.
template <class F>
MeanSe influence_mean(const Dataset& sample, F&& f) {
  double s = 0.0, ss = 0.0;
  const std::size_t n = sample.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(sample.row(i));
    s += v;
    ss += v * v;
  }
  const double mean = s / static_cast<double>(n);
  const double var = n > 1 ? (ss - n * mean * mean) / static_cast<double>(n - 1) : 0.0;
  return {mean, var > 0.0 ? std::sqrt(var / static_cast<double>(n)) : 0.0};
}

}  // namespace superopt
