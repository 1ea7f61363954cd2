#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "superopt/glm.hpp"

namespace superopt {

/// Which plug-in form estimates a regime value. `regression` averages
/// Ê(Y|A,L) over units the regime leaves alone; `alternative` averages the
/// observed Y there instead. Both use V̂ where the regime overrides A.
enum class ValueForm { regression, alternative };

std::string_view to_string(ValueForm form);
std::optional<ValueForm> parse_value_form(std::string_view text);

struct EstimationConfig {
  double split_fraction = 0.6;  // 1 disables splitting
  std::size_t bootstrap_reps = 500;
  std::uint64_t seed = 0;
  double delta_floor = 1e-3;
  double propensity_clip = 1e-3;
  double irls_tol = 1e-8;
  int irls_max_iter = 100;
  Design design = Design::saturated;
  ValueForm value_form = ValueForm::regression;
  unsigned threads = 0;  // 0 = hardware concurrency

  /// Throws ValidationError naming the first bad field.
  void validate() const;
};

nlohmann::json to_json(const EstimationConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
EstimationConfig config_from_json(const nlohmann::json& doc);
EstimationConfig load_config(const std::string& path);

}  // namespace superopt
