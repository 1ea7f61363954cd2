#include <fstream>

#include "superopt/simulate.hpp"
#include "superopt/types.hpp"

namespace superopt {

using nlohmann::json;

json law_to_json(const StructuralLaw& law) {
  json covs = json::array();
  for (const auto& c : law.schema().covariates()) covs.push_back({{"name", c.name}, {"levels", c.levels}});
  const std::size_t nl = law.num_contexts(), nu = law.num_u();
  json pa = json::array(), my = json::array();
  for (std::size_t l = 0; l < nl; ++l) {
    json by_z = json::array();
    for (int z = 0; z < 2; ++z) {
      json by_u = json::array();
      for (std::size_t u = 0; u < nu; ++u) by_u.push_back(law.p_a1(z, l, u));
      by_z.push_back(by_u);
    }
    pa.push_back(by_z);
  }
  for (int a = 0; a < 2; ++a) {
    json by_l = json::array();
    for (std::size_t l = 0; l < nl; ++l) {
      json by_u = json::array();
      for (std::size_t u = 0; u < nu; ++u) by_u.push_back(law.mean_y(a, l, u));
      by_l.push_back(by_u);
    }
    my.push_back(by_l);
  }
  json noise;
  switch (law.noise().kind) {
    case OutcomeNoise::Kind::degenerate: noise = {{"kind", "degenerate"}}; break;
    case OutcomeNoise::Kind::gaussian: noise = {{"kind", "gaussian"}, {"sigma", law.noise().sigma}}; break;
    case OutcomeNoise::Kind::bernoulli: noise = {{"kind", "bernoulli"}}; break;
  }
  return {{"covariates", covs},
          {"p_u", law.p_u_vector()},
          {"p_l", law.p_l_vector()},
          {"p_z1_given_l", law.p_z1_vector()},
          {"p_a1_given_zlu", pa},
          {"mean_y_given_alu", my},
          {"outcome_noise", noise}};
}

StructuralLaw law_from_json(const json& doc) {
  try {
    std::vector<Covariate> covs;
    if (doc.contains("covariates")) {
      for (const auto& c : doc.at("covariates")) {
        covs.push_back({c.at("name").get<std::string>(), c.at("levels").get<std::vector<std::string>>()});
      }
    }
    CovariateSchema schema(std::move(covs));
    auto p_u = doc.at("p_u").get<std::vector<double>>();
    auto p_l = doc.contains("p_l") ? doc.at("p_l").get<std::vector<double>>() : std::vector<double>{1.0};
    auto p_z1 = doc.contains("p_z1_given_l") ? doc.at("p_z1_given_l").get<std::vector<double>>()
                                             : std::vector<double>(p_l.size(), 0.5);
    const std::size_t nl = p_l.size(), nu = p_u.size();
    std::vector<double> pa(nl * 2 * nu), my(2 * nl * nu);
    const auto& jpa = doc.at("p_a1_given_zlu");
    const auto& jmy = doc.at("mean_y_given_alu");
    if (jpa.size() != nl || jmy.size() != 2) throw ValidationError("law arrays have the wrong shape");
    for (std::size_t l = 0; l < nl; ++l) {
      if (jpa[l].size() != 2) throw ValidationError("p_a1_given_zlu needs two instrument levels");
      for (int z = 0; z < 2; ++z) {
        if (jpa[l][z].size() != nu) throw ValidationError("p_a1_given_zlu has the wrong U arity");
        for (std::size_t u = 0; u < nu; ++u) pa[(l * 2 + z) * nu + u] = jpa[l][z][u].get<double>();
      }
    }
    for (int a = 0; a < 2; ++a) {
      if (jmy[a].size() != nl) throw ValidationError("mean_y_given_alu has the wrong context arity");
      for (std::size_t l = 0; l < nl; ++l) {
        if (jmy[a][l].size() != nu) throw ValidationError("mean_y_given_alu has the wrong U arity");
        for (std::size_t u = 0; u < nu; ++u) my[(a * nl + l) * nu + u] = jmy[a][l][u].get<double>();
      }
    }
    OutcomeNoise noise;
    const auto& jn = doc.at("outcome_noise");
    const auto kind = jn.at("kind").get<std::string>();
    if (kind == "degenerate") {
      noise.kind = OutcomeNoise::Kind::degenerate;
    } else if (kind == "gaussian") {
      noise = {OutcomeNoise::Kind::gaussian, jn.at("sigma").get<double>()};
    } else if (kind == "bernoulli") {
      noise.kind = OutcomeNoise::Kind::bernoulli;
    } else {
      throw ValidationError("unknown outcome noise '" + kind + "'");
    }
    return StructuralLaw(std::move(schema), std::move(p_u), std::move(p_l), std::move(p_z1),
                         std::move(pa), std::move(my), noise);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed law document: ") + e.what());
  }
}

StructuralLaw load_law(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return law_from_json(doc);
}

}  // namespace superopt
