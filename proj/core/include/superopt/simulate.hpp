#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "superopt/dataset.hpp"
#include "superopt/regime.hpp"
#include "superopt/rng.hpp"

namespace superopt {

struct OutcomeNoise {
  enum class Kind { degenerate, gaussian, bernoulli };
  Kind kind = Kind::degenerate;
  double sigma = 0.0;  // gaussian only
};

/// Discrete generative model over (U, L, Z, natural A, potential outcomes).
/// U is independent of (L, Z); Z and U meet only in P(A=1 | z, l, u), so the
/// instrument is independent of U given L by construction.
class StructuralLaw {
 public:
  /// p_a1_given_zlu is indexed [(l*2 + z) * |U| + u]; mean_y is indexed
  /// [(a * |L| + l) * |U| + u] and holds E(Y^a | L=l, U=u).
  StructuralLaw(CovariateSchema schema, std::vector<double> p_u, std::vector<double> p_l,
                std::vector<double> p_z1_given_l, std::vector<double> p_a1_given_zlu,
                std::vector<double> mean_y, OutcomeNoise noise);

  const CovariateSchema& schema() const { return schema_; }
  std::size_t num_u() const { return p_u_.size(); }
  std::size_t num_contexts() const { return p_l_.size(); }

  double p_u(std::size_t u) const { return p_u_[u]; }
  double p_l(std::size_t l) const { return p_l_[l]; }
  double p_z(int z, std::size_t l) const { return z ? p_z1_[l] : 1.0 - p_z1_[l]; }
  double p_a1(int z, std::size_t l, std::size_t u) const {
    return p_a1_[(l * 2 + z) * num_u() + u];
  }
  double p_a(int a, int z, std::size_t l, std::size_t u) const {
    return a ? p_a1(z, l, u) : 1.0 - p_a1(z, l, u);
  }
  double mean_y(int a, std::size_t l, std::size_t u) const {
    return mean_y_[(a * num_contexts() + l) * num_u() + u];
  }
  const OutcomeNoise& noise() const { return noise_; }

  const std::vector<double>& p_u_vector() const { return p_u_; }
  const std::vector<double>& p_l_vector() const { return p_l_; }
  const std::vector<double>& p_z1_vector() const { return p_z1_; }
  const std::vector<double>& p_a1_vector() const { return p_a1_; }
  const std::vector<double>& mean_y_vector() const { return mean_y_; }

 private:
  CovariateSchema schema_;
  std::vector<double> p_u_;
  std::vector<double> p_l_;
  std::vector<double> p_z1_;
  std::vector<double> p_a1_;
  std::vector<double> mean_y_;
  OutcomeNoise noise_;
};

enum class ExampleId { ex1, ex2, ex3 };
std::optional<ExampleId> parse_example_id(std::string_view text);

struct ExampleParams {
  double c = 0.2;       // ex3 compliance scale, 0 < c < 0.4
  bool with_w = false;  // ex1/ex2: carry the inert draw W as a binary covariate
};

StructuralLaw build_example_law(ExampleId id, const ExampleParams& params = {});

/// Conditioning event for the oracles; unset members are marginalised.
struct Condition {
  std::optional<int> natural;  // A = a'
  std::optional<std::size_t> context;
  std::optional<int> z;
};

/// P(condition) by exact enumeration.
double oracle_probability(const StructuralLaw& law, const Condition& condition);

/// E(Y^a | condition) by exact enumeration over (U, Z, A).
double oracle_conditional_mean(const StructuralLaw& law, int a, const Condition& condition);

/// E(Y^g), or E(Y^g | L=l) when a context is given.
double oracle_value(const StructuralLaw& law, const Regime& regime,
                    std::optional<std::size_t> context = std::nullopt);

/// Regime obtained by argmax over the oracle conditional means. Optimal
/// rules break ties toward a = 1, superoptimal rules toward a = a'.
Regime true_regime(const StructuralLaw& law, RegimeKind kind);

enum class SampleMode { observational, two_arm_trial, preference_trial };
std::optional<SampleMode> parse_sample_mode(std::string_view text);

/// Deterministic given `seed`.
Dataset draw_sample(const StructuralLaw& law, std::size_t n, std::uint64_t seed,
                    SampleMode mode = SampleMode::observational);

struct RandomLawOptions {
  std::size_t num_contexts = 2;  // one covariate "l" with this many levels
  std::size_t num_u = 2;
  /// P(A=1|z,l,u) = base(l,u) + z * d(l): the instrument strength does not
  /// depend on u.
  bool iv_compliant = true;
  /// P(A=1|z,l,u) does not depend on u.
  bool exchangeable = false;
  double floor = 0.05;
  bool binary_outcome = true;
  double min_instrument_strength = 0.1;
};

/// Random law with pmf entries drawn uniform and normalised, bounded
/// away from zero by `floor`.
StructuralLaw random_law(Rng& rng, const RandomLawOptions& options = {});

nlohmann::json law_to_json(const StructuralLaw& law);
StructuralLaw law_from_json(const nlohmann::json& doc);
StructuralLaw load_law(const std::string& path);

}  // namespace superopt
