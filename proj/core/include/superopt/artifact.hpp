#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "superopt/config.hpp"
#include "superopt/dataset.hpp"
#include "superopt/identify.hpp"
#include "superopt/nuisance.hpp"
#include "superopt/pipeline.hpp"
#include "superopt/regime.hpp"

namespace superopt {

inline constexpr int kArtifactSchemaVersion = 1;

struct ValueEntry {
  std::string regime;
  double estimate = 0.0;
  IntervalBound ci;
  bool widened = false;
  bool clamped = false;
};

/// A learned regime bundle as persisted by `fit` and served by `serve`.
struct RegimeArtifact {
  CovariateSchema schema;
  bool has_instrument = true;
  EstimationConfig config;
  std::uint64_t fingerprint = 0;
  std::size_t n_rows = 0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  Regime optimal = Regime::observed(1);
  Regime superoptimal = Regime::observed(1);
  Regime superoptimal_z = Regime::observed(1);
  std::vector<int> gamma;
  std::vector<std::size_t> support;
  Psi1Table psi1;
  std::vector<double> delta;
  std::vector<ValueEntry> values;
  std::vector<NuisanceFit> fits;
  std::vector<std::string> warnings;

  std::size_t num_contexts() const { return schema.num_contexts(); }
  const ValueEntry* value(const std::string& regime) const;
};

RegimeArtifact make_artifact(const FitResult& fit, const Dataset& data);

nlohmann::json to_json(const RegimeArtifact& artifact);
/// Validates the schema version, table totality and context keys.
RegimeArtifact artifact_from_json(const nlohmann::json& doc);

void save_artifact(const RegimeArtifact& artifact, const std::string& path);
RegimeArtifact load_artifact(const std::string& path);

/// Throws ValidationError naming the first covariate or level on which the
/// dataset disagrees with the artifact.
void check_compatible(const RegimeArtifact& artifact, const Dataset& data);

std::string fingerprint_hex(std::uint64_t fp);

/// Fixed-point text with four decimals.
std::string format4(double v);

/// "Marginal value functions under different regimes" table: one row per
/// regime with the estimate and its 95% interval.
std::string format_value_report(const std::vector<ValueEntry>& values);

}  // namespace superopt
