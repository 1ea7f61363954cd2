#include "superopt/artifact.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "superopt/types.hpp"

namespace superopt {

using nlohmann::json;

const ValueEntry* RegimeArtifact::value(const std::string& regime) const {
  for (const auto& v : values) {
    if (v.regime == regime) return &v;
  }
  return nullptr;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

std::string format4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  // Avoid printing "-0.0000".
  if (std::string(buf) == "-0.0000") return "0.0000";
  return buf;
}

RegimeArtifact make_artifact(const FitResult& fit, const Dataset& data) {
  RegimeArtifact a;
  a.schema = data.schema();
  a.has_instrument = data.has_instrument();
  a.config = fit.config;
  a.fingerprint = fit.fingerprint;
  a.n_rows = fit.n_rows;
  a.n_train = fit.n_train;
  a.n_eval = fit.n_eval;
  a.optimal = fit.regimes.optimal;
  a.superoptimal = fit.regimes.superoptimal;
  a.superoptimal_z = fit.regimes.superoptimal_z;
  a.gamma = fit.regimes.gamma;
  a.support = fit.support;
  a.psi1 = fit.train_nuisances.tables.psi1;
  a.delta = fit.train_nuisances.tables.delta;
  for (std::size_t k = 0; k < fit.values.values.size(); ++k) {
    const auto& v = fit.values.values[k];
    a.values.push_back({kReportRegimes[k], v.estimate, v.ci, v.widened, v.clamped});
  }
  a.fits = fit.train_nuisances.fits;
  a.warnings = fit.warnings;
  return a;
}

json to_json(const RegimeArtifact& a) {
  json covs = json::array();
  for (const auto& c : a.schema.covariates()) covs.push_back({{"name", c.name}, {"levels", c.levels}});
  json contexts = json::array();
  for (std::size_t l = 0; l < a.num_contexts(); ++l) {
    json by_z = json::object();
    for (int z = 0; z < 2; ++z) {
      by_z[std::to_string(z)] = {{"0", a.superoptimal_z.assign(0, l, z)}, {"1", a.superoptimal_z.assign(1, l, z)}};
    }
    contexts.push_back({{"covariates", a.schema.assignment(l)},
                        {"support", a.support[l]},
                        {"g_opt", a.optimal.assign(0, l)},
                        {"g_sup", {{"0", a.superoptimal.assign(0, l)}, {"1", a.superoptimal.assign(1, l)}}},
                        {"g_zsup", by_z},
                        {"gamma", a.gamma[l]},
                        {"instruction", std::string(to_string(static_cast<Instruction>(a.gamma[l])))},
                        {"psi1", {{"0", a.psi1[l][0]}, {"1", a.psi1[l][1]}}},
                        {"delta", a.delta[l]}});
  }
  json values = json::array();
  for (const auto& v : a.values) {
    values.push_back({{"regime", v.regime},
                      {"estimate", v.estimate},
                      {"ci_lo", v.ci.lo},
                      {"ci_hi", v.ci.hi},
                      {"widened", v.widened},
                      {"clamped", v.clamped}});
  }
  json fits = json::array();
  for (const auto& f : a.fits) fits.push_back(to_json(f));
  return {{"schema_version", kArtifactSchemaVersion},
          {"schema", {{"covariates", covs}, {"has_instrument", a.has_instrument}}},
          {"config", to_json(a.config)},
          {"data_fingerprint", fingerprint_hex(a.fingerprint)},
          {"rows", {{"total", a.n_rows}, {"train", a.n_train}, {"eval", a.n_eval}}},
          {"contexts", contexts},
          {"values", values},
          {"nuisances", fits},
          {"warnings", a.warnings}};
}

namespace {

int bit(const json& v, const std::string& what) {
  const int b = v.get<int>();
  if (!is_binary(b)) throw ValidationError("artifact: " + what + " must be 0 or 1");
  return b;
}

}  // namespace

RegimeArtifact artifact_from_json(const json& doc) {
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kArtifactSchemaVersion) {
      throw ValidationError("artifact: unsupported schema_version " + std::to_string(version));
    }
    RegimeArtifact a;
    std::vector<Covariate> covs;
    for (const auto& c : doc.at("schema").at("covariates")) {
      covs.push_back({c.at("name").get<std::string>(), c.at("levels").get<std::vector<std::string>>()});
    }
    a.schema = CovariateSchema(std::move(covs));
    a.has_instrument = doc.at("schema").at("has_instrument").get<bool>();
    a.config = config_from_json(doc.at("config"));
    a.fingerprint = std::stoull(doc.at("data_fingerprint").get<std::string>(), nullptr, 16);
    a.n_rows = doc.at("rows").at("total").get<std::size_t>();
    a.n_train = doc.at("rows").at("train").get<std::size_t>();
    a.n_eval = doc.at("rows").at("eval").get<std::size_t>();

    const auto& contexts = doc.at("contexts");
    const std::size_t nl = a.schema.num_contexts();
    if (contexts.size() != nl) throw ValidationError("artifact: regime tables are not total over the contexts");
    std::vector<std::uint8_t> opt(nl), sup(2 * nl), zsup(4 * nl);
    for (std::size_t l = 0; l < nl; ++l) {
      const auto& c = contexts[l];
      const auto assignment = c.at("covariates").get<std::map<std::string, std::string>>();
      if (a.schema.resolve(assignment) != l) throw ValidationError("artifact: contexts are out of order");
      a.support.push_back(c.at("support").get<std::size_t>());
      opt[l] = static_cast<std::uint8_t>(bit(c.at("g_opt"), "g_opt"));
      for (int ap = 0; ap < 2; ++ap) {
        const auto key = std::to_string(ap);
        sup[l * 2 + ap] = static_cast<std::uint8_t>(bit(c.at("g_sup").at(key), "g_sup"));
        for (int z = 0; z < 2; ++z) {
          zsup[(l * 2 + z) * 2 + ap] =
              static_cast<std::uint8_t>(bit(c.at("g_zsup").at(std::to_string(z)).at(key), "g_zsup"));
        }
      }
      const int g = c.at("gamma").get<int>();
      if (g < 0 || g > 2) throw ValidationError("artifact: gamma must be 0, 1 or 2");
      a.gamma.push_back(g);
      a.psi1.push_back({c.at("psi1").at("0").get<double>(), c.at("psi1").at("1").get<double>()});
      a.delta.push_back(c.at("delta").get<double>());
    }
    a.optimal = Regime::optimal(std::move(opt));
    a.superoptimal = Regime::superoptimal(std::move(sup));
    a.superoptimal_z = Regime::superoptimal_z(std::move(zsup));
    for (const auto& v : doc.at("values")) {
      const double lo = v.at("ci_lo").get<double>(), hi = v.at("ci_hi").get<double>();
      const double est = v.at("estimate").get<double>();
      if (!(lo <= est && est <= hi)) throw ValidationError("artifact: value estimate outside its interval");
      a.values.push_back({v.at("regime").get<std::string>(), est, IntervalBound(lo, hi),
                          v.value("widened", false), v.value("clamped", false)});
    }
    for (const auto& f : doc.at("nuisances")) {
      NuisanceFit nf;
      nf.model_id = f.at("model").get<std::string>();
      nf.family = f.at("family").get<std::string>() == "gaussian" ? Family::gaussian : Family::binomial;
      auto d = parse_design(f.at("design").get<std::string>());
      if (!d) throw ValidationError("artifact: unknown design in nuisance summary");
      nf.design = *d;
      nf.basis = f.at("basis").get<std::vector<std::string>>();
      nf.coefficients = f.at("coefficients").get<std::vector<double>>();
      nf.converged = f.at("converged").get<bool>();
      nf.separated = f.at("separated").get<bool>();
      nf.deviance = f.at("deviance").get<double>();
      nf.iterations = f.at("iterations").get<int>();
      nf.rows = f.at("rows").get<std::size_t>();
      a.fits.push_back(std::move(nf));
    }
    a.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return a;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("artifact: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("artifact: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ValidationError(std::string("artifact: ") + e.what());
  }
}

void save_artifact(const RegimeArtifact& artifact, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << to_json(artifact).dump(2) << '\n';
}

RegimeArtifact load_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return artifact_from_json(doc);
}

void check_compatible(const RegimeArtifact& artifact, const Dataset& data) {
  const auto& want = artifact.schema.covariates();
  const auto& got = data.schema().covariates();
  if (want.size() != got.size()) {
    throw ValidationError("schema mismatch: artifact has " + std::to_string(want.size()) +
                          " covariates, data has " + std::to_string(got.size()));
  }
  for (std::size_t j = 0; j < want.size(); ++j) {
    if (want[j].name != got[j].name) {
      throw ValidationError("schema mismatch: expected covariate '" + want[j].name + "', found '" +
                            got[j].name + "'");
    }
    if (want[j].levels != got[j].levels) {
      throw ValidationError("schema mismatch: levels of covariate '" + want[j].name + "' differ");
    }
  }
  if (artifact.has_instrument && !data.has_instrument()) {
    throw ValidationError("schema mismatch: artifact was fitted with an instrument column z");
  }
}

std::string format_value_report(const std::vector<ValueEntry>& values) {
  std::ostringstream out;
  out << "Marginal value functions under different regimes\n";
  out << "regime                 estimate   95% CI\n";
  for (const auto& v : values) {
    std::string label = v.regime == "observed"          ? "E(Y)"
                        : v.regime == "optimal_L"       ? "E(Y^g_opt)"
                        : v.regime == "superoptimal_LA" ? "E(Y^g_sup)"
                        : v.regime == "superoptimal_LAZ" ? "E(Y^g_z-sup)"
                                                         : v.regime;
    label.resize(22, ' ');
    out << label << ' ' << format4(v.estimate) << "   (" << format4(v.ci.lo) << ", " << format4(v.ci.hi) << ")\n";
  }
  return out.str();
}

}  // namespace superopt
