#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "superopt/artifact.hpp"

namespace superopt::cli {

struct Reply {
  int status = 200;
  nlohmann::json body;
};

/// Answers consultation requests from the precomputed tables of an artifact.
/// Holds no mutable state, so one instance may serve concurrent requests.
class Recommender {
 public:
  explicit Recommender(RegimeArtifact artifact);

  const RegimeArtifact& artifact() const { return artifact_; }

  nlohmann::json meta() const;

  /// Body {covariates: {name: level}, intent?: 0|1, instrument?: 0|1}.
  /// 400 on malformed bodies and unknown covariates or levels, 404 when the
  /// context had no training rows.
  Reply recommend(const nlohmann::json& request) const;
  Reply recommend_text(const std::string& body) const;

 private:
  RegimeArtifact artifact_;
  nlohmann::json values_;
};

}  // namespace superopt::cli
