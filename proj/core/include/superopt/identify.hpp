#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "superopt/dataset.hpp"
#include "superopt/regime.hpp"
#include "superopt/simulate.hpp"

namespace superopt {

/// Law of the observed data (L, Z, A, Y), stored through the conditionals
/// P(L=l), f(1|l) = P(Z=1|l), P(A=1|z,l) and E(Y|A=a,Z=z,L=l). A law
/// without an instrument keeps everything in the z = 0 slot with f(1|l) = 0.
class ObservedLaw {
 public:
  ObservedLaw(CovariateSchema schema, bool has_instrument, std::vector<double> p_l,
              std::vector<double> f1, std::vector<double> p_a1_given_zl,
              std::vector<double> mean_y_given_azl);

  /// Marginalises U out of a structural law.
  static ObservedLaw from_structural(const StructuralLaw& law);
  /// Empirical frequencies and cell means; empty cells get mean 0.
  static ObservedLaw from_dataset(const Dataset& data);

  const CovariateSchema& schema() const { return schema_; }
  bool has_instrument() const { return has_instrument_; }
  std::size_t num_contexts() const { return p_l_.size(); }

  double p_l(std::size_t l) const { return p_l_[l]; }
  double f(int z, std::size_t l) const { return z ? f1_[l] : 1.0 - f1_[l]; }
  double p_a_given_zl(int a, int z, std::size_t l) const {
    const double p1 = p_a1_[l * 2 + z];
    return a ? p1 : 1.0 - p1;
  }
  double mean_y_given_azl(int a, int z, std::size_t l) const { return mean_y_[(l * 2 + z) * 2 + a]; }

  double p_a_given_l(int a, std::size_t l) const;
  double mean_y_given_al(int a, std::size_t l) const;
  double mean_y_given_l(std::size_t l) const;
  double mean_y() const;
  double p_a(int a) const;

  /// δ(l) = P(A=1|Z=1,l) − P(A=1|Z=0,l).
  double delta(std::size_t l) const;
  /// E((2A−1) Y I(A=a) | Z=z, L=l).
  double signed_outcome_mean(int a, int z, std::size_t l) const;

  nlohmann::json to_json() const;

 private:
  CovariateSchema schema_;
  bool has_instrument_;
  std::vector<double> p_l_;
  std::vector<double> f1_;
  std::vector<double> p_a1_;
  std::vector<double> mean_y_;
};

/// [l][a]
using Psi1Table = std::vector<std::array<double, 2>>;

/// E(Y^a | A=a', context) indexed [context][a'][a].
using NaturalMeans = std::vector<std::array<std::array<double, 2>, 2>>;

/// ψ₁(a,l) = Σ_z (2z−1)/δ(l) · E(Y(2A−1)I(A=a) | L=l, Z=z), which equals
/// E(Y^a | L=l) under the instrumental-variable conditions with treatment
/// homogeneity (δ(l,u) constant in u). Not checkable from the observed law;
/// callers supply laws where it holds.
double psi1(const ObservedLaw& law, int a, std::size_t l);
Psi1Table psi1_table(const ObservedLaw& law);

/// E(Y^a | A=a', L=l): E(Y|A=a',l) when a = a', otherwise
/// [ψ₁(a,l) − E(Y|A=a,l)P(A=a|l)] / P(A=a'|l).
double counterfactual_mean_given_natural(const ObservedLaw& law, const Psi1Table& psi,
                                         int a, int a_prime, std::size_t l);
NaturalMeans natural_means(const ObservedLaw& law, const Psi1Table& psi);

/// g(a',l) = a' iff E(Y|l) ≥ ψ₁(1−a',l); otherwise 1 − a'.
Regime superoptimal_rule(const ObservedLaw& law, const Psi1Table& psi);
/// argmax_a ψ₁(a,l), ties to 1.
Regime optimal_rule(const Psi1Table& psi);

/// E(Y^a | A=a', L=l, Z=z) with contexts indexed l*2 + z.
NaturalMeans lz_natural_means(const ObservedLaw& law, const Psi1Table& psi);
/// argmax over a of E(Y^a | A=a', L=l, Z=z), ties to a'.
Regime lz_superoptimal_rule(const ObservedLaw& law, const Psi1Table& psi);

enum class Instruction { follow = 0, keep_intent = 1, flip_intent = 2 };
std::string_view to_string(Instruction instruction);

/// γ per context from τ(a') = E(Y^1|A=a',l) − E(Y^0|A=a',l):
/// 0 when τ(1), τ(0) share a sign, 1 when τ(1) ≥ 0 > τ(0), 2 when
/// τ(1) < 0 ≤ τ(0).
std::vector<int> gamma_map(const NaturalMeans& means);

/// g(a,l) = g_opt(l), a, or 1−a according to γ(l).
Regime reconstruct_superoptimal(const Regime& optimal, const std::vector<int>& gamma);

/// E(Y | A*=a, A=a', L=l) over all arms of a trial with recorded natural
/// treatment.
double preference_trial_mean(const Dataset& data, int a, int a_prime, std::size_t l);

}  // namespace superopt
