#include "superopt/config.hpp"

#include <fstream>

#include "superopt/types.hpp"

namespace superopt {

using nlohmann::json;

std::string_view to_string(ValueForm form) {
  return form == ValueForm::regression ? "regression" : "alternative";
}

std::optional<ValueForm> parse_value_form(std::string_view text) {
  if (text == "regression") return ValueForm::regression;
  if (text == "alternative") return ValueForm::alternative;
  return std::nullopt;
}

void EstimationConfig::validate() const {
  if (!(split_fraction > 0.0 && split_fraction <= 1.0)) throw ValidationError("split_fraction must lie in (0,1]");
  if (bootstrap_reps == 0) throw ValidationError("bootstrap_reps must be positive");
  if (!(delta_floor > 0.0 && delta_floor < 1.0)) throw ValidationError("delta_floor must lie in (0,1)");
  if (!(propensity_clip > 0.0 && propensity_clip < 0.5)) {
    throw ValidationError("propensity_clip must lie in (0,0.5)");
  }
  if (!(irls_tol > 0.0)) throw ValidationError("irls_tol must be positive");
  if (irls_max_iter <= 0) throw ValidationError("irls_max_iter must be positive");
}

json to_json(const EstimationConfig& cfg) {
  return {{"split_fraction", cfg.split_fraction},
          {"bootstrap_reps", cfg.bootstrap_reps},
          {"seed", cfg.seed},
          {"delta_floor", cfg.delta_floor},
          {"propensity_clip", cfg.propensity_clip},
          {"irls_tol", cfg.irls_tol},
          {"irls_max_iter", cfg.irls_max_iter},
          {"design", std::string(to_string(cfg.design))},
          {"value_form", std::string(to_string(cfg.value_form))},
          {"threads", cfg.threads}};
}

EstimationConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  EstimationConfig cfg;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "split_fraction") cfg.split_fraction = v.get<double>();
      else if (key == "bootstrap_reps") cfg.bootstrap_reps = v.get<std::size_t>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "delta_floor") cfg.delta_floor = v.get<double>();
      else if (key == "propensity_clip") cfg.propensity_clip = v.get<double>();
      else if (key == "irls_tol") cfg.irls_tol = v.get<double>();
      else if (key == "irls_max_iter") cfg.irls_max_iter = v.get<int>();
      else if (key == "threads") cfg.threads = v.get<unsigned>();
      else if (key == "design") {
        auto d = parse_design(v.get<std::string>());
        if (!d) throw ValidationError("config: unknown design '" + v.get<std::string>() + "'");
        cfg.design = *d;
      } else if (key == "value_form") {
        auto f = parse_value_form(v.get<std::string>());
        if (!f) throw ValidationError("config: unknown value_form '" + v.get<std::string>() + "'");
        cfg.value_form = *f;
      } else {
        throw ValidationError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

EstimationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace superopt
