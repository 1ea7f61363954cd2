#include "recommender.hpp"

#include <algorithm>
#include <map>

namespace superopt::cli {

using nlohmann::json;

namespace {

Reply error(int status, const std::string& message, const std::string& field = {}) {
  json body = {{"error", message}};
  if (!field.empty()) body["field"] = field;
  return {status, body};
}

std::optional<int> binary_field(const json& req, const char* name, std::string& problem) {
  if (!req.contains(name) || req[name].is_null()) return std::nullopt;
  const auto& v = req[name];
  if (v.is_number_integer() && is_binary(v.get<int>())) return v.get<int>();
  if (v.is_string() && (v == "0" || v == "1")) return v == "1" ? 1 : 0;
  problem = std::string(name) + " must be 0 or 1";
  return std::nullopt;
}

}  // namespace

Recommender::Recommender(RegimeArtifact artifact) : artifact_(std::move(artifact)) {
  values_ = json::array();
  for (const auto& v : artifact_.values) {
    values_.push_back({{"regime", v.regime}, {"estimate", v.estimate}, {"ci_lo", v.ci.lo}, {"ci_hi", v.ci.hi}});
  }
}

json Recommender::meta() const {
  json covs = json::array();
  for (const auto& c : artifact_.schema.covariates()) covs.push_back({{"name", c.name}, {"levels", c.levels}});
  return {{"schema_version", kArtifactSchemaVersion},
          {"schema", {{"covariates", covs}, {"has_instrument", artifact_.has_instrument}}},
          {"regime_kinds", {"observed", "optimal_L", "superoptimal_LA", "superoptimal_LAZ"}},
          {"values", values_},
          {"data_fingerprint", fingerprint_hex(artifact_.fingerprint)},
          {"rows", {{"total", artifact_.n_rows}, {"train", artifact_.n_train}, {"eval", artifact_.n_eval}}}};
}

Reply Recommender::recommend(const json& req) const {
  if (!req.is_object()) return error(400, "request body must be a JSON object");
  for (const auto& [key, _] : req.items()) {
    if (key != "covariates" && key != "intent" && key != "instrument") {
      return error(400, "unknown request field '" + key + "'", key);
    }
  }
  std::map<std::string, std::string> values;
  if (req.contains("covariates")) {
    const auto& covs = req["covariates"];
    if (!covs.is_object()) return error(400, "covariates must be an object", "covariates");
    for (const auto& [name, level] : covs.items()) {
      if (level.is_string()) {
        values[name] = level.get<std::string>();
      } else if (level.is_number_integer()) {
        values[name] = std::to_string(level.get<long long>());
      } else {
        return error(400, "level of covariate '" + name + "' must be a string", name);
      }
    }
  }
  std::size_t l = 0;
  try {
    l = artifact_.schema.resolve(values);
  } catch (const ValidationError& e) {
    // Same order as resolve(): unknown names, then missing or bad levels.
    const auto& covs = artifact_.schema.covariates();
    std::string field;
    for (const auto& [name, _] : values) {
      if (std::none_of(covs.begin(), covs.end(), [&](const Covariate& c) { return c.name == name; })) {
        field = name;
        break;
      }
    }
    for (const auto& c : covs) {
      if (!field.empty()) break;
      auto it = values.find(c.name);
      if (it == values.end() || !c.level_index(it->second)) field = c.name;
    }
    return error(400, e.what(), field);
  }

  std::string problem;
  const auto intent = binary_field(req, "intent", problem);
  if (!problem.empty()) return error(400, problem, "intent");
  const auto instrument = binary_field(req, "instrument", problem);
  if (!problem.empty()) return error(400, problem, "instrument");
  if (instrument && !artifact_.has_instrument) {
    return error(400, "artifact was fitted without an instrument", "instrument");
  }
  if (artifact_.support[l] == 0) {
    return error(404, "context " + artifact_.schema.label(l) + " has no training rows");
  }

  const int gamma = artifact_.gamma[l];
  json body = {{"context", artifact_.schema.label(l)},
               {"covariates", artifact_.schema.assignment(l)},
               {"g_opt", artifact_.optimal.assign(0, l)},
               {"g_sup_by_intent",
                {{"0", artifact_.superoptimal.assign(0, l)}, {"1", artifact_.superoptimal.assign(1, l)}}},
               {"gamma", gamma},
               {"instruction", std::string(to_string(static_cast<Instruction>(gamma)))},
               {"value_estimates", values_}};
  if (instrument) {
    body["instrument"] = *instrument;
    body["g_zsup_by_intent"] = {{"0", artifact_.superoptimal_z.assign(0, l, *instrument)},
                                {"1", artifact_.superoptimal_z.assign(1, l, *instrument)}};
  }
  if (intent) {
    body["intent"] = *intent;
    body["g_sup"] = artifact_.superoptimal.assign(*intent, l);
    if (instrument) body["g_zsup"] = artifact_.superoptimal_z.assign(*intent, l, *instrument);
  }
  return {200, body};
}

Reply Recommender::recommend_text(const std::string& text) const {
  json req;
  try {
    req = json::parse(text);
  } catch (const json::exception& e) {
    return error(400, std::string("malformed JSON: ") + e.what());
  }
  return recommend(req);
}

}  // namespace superopt::cli
