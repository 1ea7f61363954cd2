#include "superopt/diagnose.hpp"

#include <algorithm>
#include <sstream>

#include "superopt/artifact.hpp"
#include "superopt/bootstrap.hpp"
#include "superopt/estimate.hpp"
#include "superopt/nuisance.hpp"

namespace superopt {

using nlohmann::json;

Coarsening Coarsening::trivial(const CovariateSchema& schema, bool split_by_treatment) {
  return {split_by_treatment, std::vector<std::size_t>(schema.num_contexts(), 0), {"*"}};
}

Coarsening Coarsening::identity(const CovariateSchema& schema, bool split_by_treatment) {
  Coarsening c{split_by_treatment, {}, {}};
  for (std::size_t l = 0; l < schema.num_contexts(); ++l) {
    c.context_map.push_back(l);
    c.labels.push_back(schema.label(l));
  }
  return c;
}

Coarsening Coarsening::by_covariate(const CovariateSchema& schema, const std::string& name,
                                    bool split_by_treatment) {
  const auto& covs = schema.covariates();
  const auto it = std::find_if(covs.begin(), covs.end(), [&](const Covariate& c) { return c.name == name; });
  if (it == covs.end()) throw ValidationError("unknown covariate '" + name + "'");
  const auto j = static_cast<std::size_t>(it - covs.begin());
  Coarsening c{split_by_treatment, {}, {}};
  for (const auto& level : it->levels) c.labels.push_back(name + "=" + level);
  for (std::size_t l = 0; l < schema.num_contexts(); ++l) c.context_map.push_back(schema.decode(l)[j]);
  return c;
}

std::vector<Stratum> strata(const Coarsening& coarsening) {
  std::vector<Stratum> out;
  for (std::size_t c = 0; c < coarsening.num_strata(); ++c) {
    if (coarsening.split_by_treatment) {
      out.push_back({0, c});
      out.push_back({1, c});
    } else {
      out.push_back({-1, c});
    }
  }
  return out;
}

namespace {

std::string stratum_label(const Coarsening& co, const Stratum& s) {
  std::string label = co.labels[s.c];
  if (s.b >= 0) label += " | A=" + std::to_string(s.b);
  return label;
}

bool in_stratum(const Coarsening& co, const Stratum& s, std::size_t l, int a) {
  return co.context_map[l] == s.c && (s.b < 0 || s.b == a);
}

}  // namespace

std::vector<IntervalBound> confounding_intervals(const Psi1Table& psi, const std::vector<double>& cell_mass,
                                                 const Coarsening& coarsening) {
  if (cell_mass.size() != 2 * psi.size() || coarsening.context_map.size() != psi.size()) {
    throw ValidationError("coarsening, psi1 and cell masses disagree on the context space");
  }
  std::vector<IntervalBound> out;
  for (const auto& s : strata(coarsening)) {
    double mass = 0.0, lo = 0.0, hi = 0.0;
    for (std::size_t l = 0; l < psi.size(); ++l) {
      for (int a = 0; a < 2; ++a) {
        if (!in_stratum(coarsening, s, l, a)) continue;
        const double w = cell_mass[l * 2 + a];
        mass += w;
        lo += w * std::min(psi[l][0], psi[l][1]);
        hi += w * std::max(psi[l][0], psi[l][1]);
      }
    }
    if (!(mass > 0.0)) throw IdentificationError("empty stratum " + stratum_label(coarsening, s));
    out.emplace_back(lo / mass, hi / mass);
  }
  return out;
}

std::string_view to_string(Verdict v) { return v == Verdict::contained ? "contained" : "violated"; }

Verdict check_containment(const IntervalBound& interval, double value, double tol) {
  return interval.contains(value, tol) ? Verdict::contained : Verdict::violated;
}

Verdict check_containment_ci(const IntervalBound& lower_endpoint_ci, const IntervalBound& upper_endpoint_ci,
                             const IntervalBound& tested_ci) {
  if (tested_ci.hi < lower_endpoint_ci.lo || tested_ci.lo > upper_endpoint_ci.hi) return Verdict::violated;
  return Verdict::contained;
}

bool DiagnosticReport::any_violation() const {
  return std::any_of(strata.begin(), strata.end(), [](const StratumReport& s) {
    return s.mean_verdict == Verdict::violated || s.value_verdict == Verdict::violated;
  });
}

DiagnosticReport diagnose_law(const ObservedLaw& law, const Coarsening& coarsening, double tol) {
  const Psi1Table psi = psi1_table(law);
  const Regime g = superoptimal_rule(law, psi);
  const std::size_t nl = law.num_contexts();
  std::vector<double> mass(2 * nl), mean(2 * nl), value(2 * nl);
  for (std::size_t l = 0; l < nl; ++l) {
    for (int a = 0; a < 2; ++a) {
      mass[l * 2 + a] = law.p_l(l) * law.p_a_given_l(a, l);
      if (mass[l * 2 + a] > 0.0) {
        mean[l * 2 + a] = law.mean_y_given_al(a, l);
        value[l * 2 + a] = counterfactual_mean_given_natural(law, psi, g.assign(a, l), a, l);
      }
    }
  }
  const auto intervals = confounding_intervals(psi, mass, coarsening);
  DiagnosticReport report;
  const auto ss = strata(coarsening);
  for (std::size_t k = 0; k < ss.size(); ++k) {
    StratumReport r;
    r.stratum = ss[k];
    r.label = stratum_label(coarsening, ss[k]);
    r.interval = intervals[k];
    double m = 0.0, my = 0.0, mv = 0.0;
    for (std::size_t l = 0; l < nl; ++l) {
      for (int a = 0; a < 2; ++a) {
        if (!in_stratum(coarsening, ss[k], l, a)) continue;
        m += mass[l * 2 + a];
        my += mass[l * 2 + a] * mean[l * 2 + a];
        mv += mass[l * 2 + a] * value[l * 2 + a];
      }
    }
    r.mean_y = my / m;
    r.value_sup = mv / m;
    r.mean_verdict = check_containment(r.interval, r.mean_y, tol);
    r.value_verdict = check_containment(r.interval, r.value_sup, tol);
    report.strata.push_back(r);
  }
  return report;
}

namespace {

// [lo, hi, mean_y, value_sup] per stratum.
std::vector<double> sample_statistics(const Dataset& data, const Regime& g, const Coarsening& co,
                                      const EstimationConfig& cfg) {
  const NuisanceSet nuis = fit_nuisances(data, cfg);
  const std::size_t nl = data.num_contexts();
  const auto contrib = value_contributions(data, g, nuis.tables, cfg);
  const auto ctx = data.context();
  const auto a = data.a();
  const auto y = data.y();
  std::vector<double> count(2 * nl, 0.0), sum_y(2 * nl, 0.0), sum_v(2 * nl, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t k = ctx[i] * 2 + a[i];
    count[k] += 1.0;
    sum_y[k] += y[i];
    sum_v[k] += contrib[i];
  }
  std::vector<double> mass(2 * nl);
  for (std::size_t k = 0; k < mass.size(); ++k) mass[k] = count[k] / static_cast<double>(data.size());
  const auto intervals = confounding_intervals(nuis.tables.psi1, mass, co);
  const auto ss = strata(co);
  std::vector<double> out;
  for (std::size_t k = 0; k < ss.size(); ++k) {
    double n = 0.0, sy = 0.0, sv = 0.0;
    for (std::size_t l = 0; l < nl; ++l) {
      for (int av = 0; av < 2; ++av) {
        if (!in_stratum(co, ss[k], l, av)) continue;
        n += count[l * 2 + av];
        sy += sum_y[l * 2 + av];
        sv += sum_v[l * 2 + av];
      }
    }
    out.insert(out.end(), {intervals[k].lo, intervals[k].hi, sy / n, sv / n});
  }
  return out;
}

}  // namespace

DiagnosticReport diagnose_sample(const Dataset& data, const Regime& g_sup, const Coarsening& co,
                                 const EstimationConfig& cfg) {
  cfg.validate();
  auto stat = [&](const Dataset& d) { return sample_statistics(d, g_sup, co, cfg); };
  const std::vector<double> point = stat(data);
  const ReplicateSet rs = bootstrap_replicates(data, cfg.bootstrap_reps, cfg.seed, cfg.threads, stat);
  auto ci = [&](std::size_t j) {
    std::vector<double> col;
    for (const auto& r : rs.values) col.push_back(r[j]);
    return percentile_interval(col, 0.95);
  };
  DiagnosticReport report;
  if (rs.dropped > 0) report.warnings.push_back("bootstrap dropped " + std::to_string(rs.dropped) + " replicates");
  const auto ss = strata(co);
  for (std::size_t k = 0; k < ss.size(); ++k) {
    StratumReport r;
    r.stratum = ss[k];
    r.label = stratum_label(co, ss[k]);
    r.interval = IntervalBound(point[4 * k], point[4 * k + 1]);
    r.mean_y = point[4 * k + 2];
    r.value_sup = point[4 * k + 3];
    r.lower_ci = ci(4 * k);
    r.upper_ci = ci(4 * k + 1);
    r.mean_y_ci = ci(4 * k + 2);
    r.value_sup_ci = ci(4 * k + 3);
    r.mean_verdict = check_containment_ci(*r.lower_ci, *r.upper_ci, *r.mean_y_ci);
    r.value_verdict = check_containment_ci(*r.lower_ci, *r.upper_ci, *r.value_sup_ci);
    report.strata.push_back(r);
  }
  return report;
}

json to_json(const DiagnosticReport& report) {
  auto interval = [](const IntervalBound& b) { return json::array({b.lo, b.hi}); };
  json strata_json = json::array();
  for (const auto& s : report.strata) {
    json j = {{"stratum", s.label},
              {"b", s.stratum.b < 0 ? json(nullptr) : json(s.stratum.b)},
              {"interval", interval(s.interval)},
              {"mean_y", s.mean_y},
              {"value_sup", s.value_sup},
              {"mean_y_verdict", std::string(to_string(s.mean_verdict))},
              {"value_sup_verdict", std::string(to_string(s.value_verdict))}};
    if (s.lower_ci) {
      j["lower_ci"] = interval(*s.lower_ci);
      j["upper_ci"] = interval(*s.upper_ci);
      j["mean_y_ci"] = interval(*s.mean_y_ci);
      j["value_sup_ci"] = interval(*s.value_sup_ci);
    }
    strata_json.push_back(j);
  }
  return {{"strata", strata_json}, {"violation", report.any_violation()}, {"warnings", report.warnings}};
}

std::string format_diagnostic_table(const DiagnosticReport& report) {
  std::ostringstream out;
  out << "stratum                interval              E(Y|b,c)  verdict     E(Y^g_sup|b,c)  verdict\n";
  for (const auto& s : report.strata) {
    std::string label = s.label;
    if (label.size() < 22) label.resize(22, ' ');
    std::string iv = "[" + format4(s.interval.lo) + ", " + format4(s.interval.hi) + "]";
    if (iv.size() < 21) iv.resize(21, ' ');
    std::string mv(to_string(s.mean_verdict));
    mv.resize(10, ' ');
    out << label << ' ' << iv << ' ' << format4(s.mean_y) << "    " << mv << "  " << format4(s.value_sup)
        << "          " << to_string(s.value_verdict) << '\n';
  }
  out << (report.any_violation() ? "unmeasured confounding indicated\n" : "no violation\n");
  return out.str();
}

}  // namespace superopt
