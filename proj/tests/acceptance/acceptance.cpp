// Acceptance suite: one PASS/FAIL line per criterion A1–A11.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lp_oracle.hpp"
#include "pathwise.hpp"
#include "superopt/artifact.hpp"
#include "superopt/bootstrap.hpp"
#include "superopt/bounds.hpp"
#include "superopt/diagnose.hpp"
#include "superopt/estimate.hpp"
#include "superopt/identify.hpp"
#include "superopt/influence.hpp"
#include "superopt/pipeline.hpp"
#include "superopt/simulate.hpp"

using namespace superopt;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Tracks the largest deviation seen against a tolerance.
struct MaxErr {
  double worst = 0.0;
  void add(double got, double want) { worst = std::max(worst, std::abs(got - want)); }
  bool within(double tol) const { return worst <= tol; }
};

// A1, A2
Outcome example_values(ExampleId id, double observed, double optimal, double superoptimal) {
  const auto t0 = Clock::now();
  const auto law = build_example_law(id);
  MaxErr e;
  e.add(oracle_value(law, Regime::observed(law.num_contexts())), observed);
  e.add(oracle_value(law, true_regime(law, RegimeKind::optimal_L)), optimal);
  e.add(oracle_value(law, true_regime(law, RegimeKind::superoptimal_LA)), superoptimal);
  const double secs = seconds_since(t0);
  return {e.within(1e-12) && secs < 1.0, "max err " + fmt("%.2e", e.worst) + ", " + fmt("%.3f", secs) + " s"};
}

// A3
Outcome example3() {
  const auto law = build_example_law(ExampleId::ex3);
  auto cond = [](int ap, int z) { return Condition{ap, 0, z}; };
  MaxErr e;
  e.add(oracle_conditional_mean(law, 1, cond(1, 1)), 4.0 / 10);
  e.add(oracle_conditional_mean(law, 0, cond(1, 1)), 19.0 / 40);
  e.add(oracle_conditional_mean(law, 1, cond(0, 0)), 11.0 / 20);
  const double m00 = oracle_conditional_mean(law, 0, cond(0, 0));
  e.add(m00, 17.0 / 80);
  const Regime g = true_regime(law, RegimeKind::superoptimal_LAZ);
  const bool table = g.assign(1, 0, 1) == 0 && g.assign(0, 0, 0) == 1;
  return {e.within(1e-12) && table,
          "max err " + fmt("%.2e", e.worst) + ", E(Y^0|A=0,Z=0)=" + fmt("%.6f", m00) + " (17/80=0.2125)" +
              ", g(1,z=1)=" + std::to_string(g.assign(1, 0, 1)) + " g(0,z=0)=" + std::to_string(g.assign(0, 0, 0))};
}

TrialCounts counts_from_types(Rng& rng) {
  std::uniform_int_distribution<int> w(0, 50);
  std::bernoulli_distribution sparse(0.3);
  std::uniform_int_distribution<int> scale(1, 3);
  const std::uint64_t k1 = static_cast<std::uint64_t>(scale(rng));
  TrialCounts c;
  for (int t = 0; t < 16; ++t) {
    const std::uint64_t weight = sparse(rng) ? 0 : static_cast<std::uint64_t>(w(rng));
    const int a0 = t & 1, a1 = (t >> 1) & 1, y0 = (t >> 2) & 1, y1 = (t >> 3) & 1;
    c.n[a0 ? y1 : y0][a0][0] += weight;
    c.n[a1 ? y1 : y0][a1][1] += weight * k1;
  }
  if (c.arm_total(0) == 0) c.n[0][0][0] = c.n[0][0][1] = 1;
  return c;
}

// A4
Outcome balke_pearl(const std::string& data_dir) {
  Rng rng = make_rng(44);
  MaxErr e;
  int compared = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const TrialCounts c = counts_from_types(rng);
    const auto lp = oracle::lp_oracle_bounds(c, oracle::Estimand::ate);
    if (!lp) return {false, "LP oracle infeasible on a type-generated table"};
    const auto bp = balke_pearl_ate_bounds(c);
    e.add(bp.lo, lp->lo);
    e.add(bp.hi, lp->hi);
    ++compared;
  }
  Outcome out{e.within(1e-9), std::to_string(compared) + " tables, max err " + fmt("%.2e", e.worst)};
  const std::string path = data_dir + "/vitamin_a_counts.csv";
  if (!data_dir.empty() && std::filesystem::exists(path)) {
    const TrialCounts c = load_trial_counts(path);
    const auto ate = balke_pearl_ate_bounds(c);
    const auto att1 = natural_att_bounds(c, 1);
    const auto att0 = natural_att_bounds(c, 0);
    const bool ok = std::abs(ate.lo + 0.1946) <= 5e-4 && std::abs(ate.hi - 0.0054) <= 5e-4 &&
                    std::abs(att1.lo - 0.0032) <= 5e-4 && std::abs(att1.hi - 0.0032) <= 5e-4 &&
                    std::abs(att0.lo + 0.33) <= 5e-3 && std::abs(att0.hi - 0.0069) <= 5e-3;
    out.pass = out.pass && ok;
    out.detail += "; Vitamin A ATE [" + format4(ate.lo) + ", " + format4(ate.hi) + "], ATT " + format4(att1.lo) +
                  ", ATT0 [" + format4(att0.lo) + ", " + format4(att0.hi) + "]";
  } else {
    out.detail += "; counts file not supplied";
  }
  return out;
}

void identification_errors(const StructuralLaw& law, MaxErr& e, int& table_mismatches) {
  const auto obs = ObservedLaw::from_structural(law);
  const auto psi = psi1_table(obs);
  const auto nm = natural_means(obs, psi);
  std::vector<int> gamma_oracle;
  for (std::size_t l = 0; l < law.num_contexts(); ++l) {
    double m[2][2];
    for (int a = 0; a < 2; ++a) {
      e.add(psi[l][a], oracle_conditional_mean(law, a, {std::nullopt, l, std::nullopt}));
      for (int ap = 0; ap < 2; ++ap) {
        m[ap][a] = oracle_conditional_mean(law, a, {ap, l, std::nullopt});
        e.add(counterfactual_mean_given_natural(obs, psi, a, ap, l), m[ap][a]);
      }
    }
    NaturalMeans one(1);
    one[0] = {{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}};
    gamma_oracle.push_back(gamma_map(one)[0]);
  }
  if (gamma_map(nm) != gamma_oracle) ++table_mismatches;
  if (optimal_rule(psi) != true_regime(law, RegimeKind::optimal_L)) ++table_mismatches;
  if (superoptimal_rule(obs, psi) != true_regime(law, RegimeKind::superoptimal_LA)) ++table_mismatches;
  if (lz_superoptimal_rule(obs, psi) != true_regime(law, RegimeKind::superoptimal_LAZ)) ++table_mismatches;
}

// A5
Outcome identification() {
  MaxErr e;
  int mismatches = 0;
  for (auto id : {ExampleId::ex1, ExampleId::ex2, ExampleId::ex3}) identification_errors(build_example_law(id), e, mismatches);
  Rng rng = make_rng(55);
  for (int rep = 0; rep < 50; ++rep) {
    RandomLawOptions o;
    o.num_contexts = 1 + rep % 3;
    o.num_u = 2 + rep % 2;
    o.binary_outcome = rep % 5 != 4;
    identification_errors(random_law(rng, o), e, mismatches);
  }
  return {e.within(1e-10) && mismatches == 0,
          "53 laws, max err " + fmt("%.2e", e.worst) + ", table mismatches " + std::to_string(mismatches)};
}

// A6
Outcome consistency() {
  const auto t0 = Clock::now();
  const auto law = build_example_law(ExampleId::ex3);
  const auto obs = ObservedLaw::from_structural(law);
  const auto psi = psi1_table(obs);
  const Regime g = true_regime(law, RegimeKind::superoptimal_LA);
  const double value = oracle_value(law, g);
  EstimationConfig cfg;
  cfg.split_fraction = 1.0;
  const std::vector<std::size_t> sizes{1000, 10000, 100000};
  constexpr int kSeeds = 20;
  std::vector<double> rmse;
  for (std::size_t n : sizes) {
    double ss = 0.0;
    for (int s = 0; s < kSeeds; ++s) {
      const Dataset d = draw_sample(law, n, 6000 + s);
      const auto t = fit_nuisances(d, cfg).tables;
      double worst = std::abs(estimate_value(d, g, t, cfg) - value);
      for (int a = 0; a < 2; ++a) worst = std::max(worst, std::abs(t.psi1[0][a] - psi[0][a]));
      ss += worst * worst;
    }
    rmse.push_back(std::sqrt(ss / kSeeds));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const double x = std::log(static_cast<double>(sizes[k])), y = std::log(rmse[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double m = static_cast<double>(sizes.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const bool monotone = rmse[0] > rmse[1] && rmse[1] > rmse[2];
  const double secs = seconds_since(t0);
  const bool pass = monotone && slope >= -0.65 && slope <= -0.35 && rmse[2] < 0.02 && secs < 120;
  return {pass, "rmse " + fmt("%.4f", rmse[0]) + " / " + fmt("%.4f", rmse[1]) + " / " + fmt("%.4f", rmse[2]) +
                    ", slope " + fmt("%.3f", slope) + ", " + fmt("%.1f", secs) + " s"};
}

// A7
Outcome influence() {
  Rng rng = make_rng(77);
  RandomLawOptions o;
  o.num_contexts = 2;
  const auto law = random_law(rng, o);
  const Dataset d = draw_sample(law, 100000, 7);
  const auto t = nuisance_tables(ObservedLaw::from_structural(law));
  const Regime g = true_regime(law, RegimeKind::superoptimal_LA);
  double worst_ratio = 0.0;
  auto check = [&](const MeanSe& ms) { worst_ratio = std::max(worst_ratio, std::abs(ms.mean) / ms.se); };
  for (std::size_t l = 0; l < 2; ++l) {
    for (int a = 0; a < 2; ++a) {
      check(influence_mean(d, [&](const Observation& r) { return eif_psi1(r, t, a, l); }));
      check(influence_mean(d, [&](const Observation& r) { return eif_Psi(r, t, a, l); }));
    }
  }
  check(influence_mean(d, [&](const Observation& r) { return eif_value(r, g, t); }));

  MaxErr fd;
  for (int rep = 0; rep < 20; ++rep) {
    const auto dl = oracle::random_discrete_law(rng, 2);
    const auto h = oracle::random_score(rng, dl);
    const auto dt = nuisance_tables(dl.observed());
    std::vector<std::uint8_t> table(4);
    for (std::size_t k = 0; k < 4; ++k) table[k] = static_cast<std::uint8_t>((rep >> k) & 1);
    const Regime gr = Regime::superoptimal(table);
    for (std::size_t l = 0; l < 2; ++l) {
      for (int a = 0; a < 2; ++a) {
        fd.add(oracle::pathwise_derivative(dl, h, [&](const ObservedLaw& p) { return psi1(p, a, l); }),
               oracle::gradient_inner(dl, h, [&](const Observation& r) { return eif_psi1(r, dt, a, l); }));
        fd.add(oracle::pathwise_derivative(dl, h, [&](const ObservedLaw& p) {
                 return counterfactual_mean_given_natural(p, psi1_table(p), a, 1 - a, l);
               }),
               oracle::gradient_inner(dl, h, [&](const Observation& r) { return eif_Psi(r, dt, a, l); }));
      }
    }
    fd.add(oracle::pathwise_derivative(dl, h,
                                       [&](const ObservedLaw& p) {
                                         const auto ps = psi1_table(p);
                                         double v = 0.0;
                                         for (std::size_t l = 0; l < 2; ++l) {
                                           for (int a = 0; a < 2; ++a) {
                                             v += p.p_l(l) * p.p_a_given_l(a, l) *
                                                  counterfactual_mean_given_natural(p, ps, gr.assign(a, l), a, l);
                                           }
                                         }
                                         return v;
                                       }),
           oracle::gradient_inner(dl, h, [&](const Observation& r) { return eif_value(r, gr, dt); }));
  }
  return {worst_ratio <= 3.0 && fd.within(1e-4),
          "max |mean|/SE " + fmt("%.2f", worst_ratio) + ", max pathwise err " + fmt("%.2e", fd.worst)};
}

// A8
Outcome coverage() {
  const auto t0 = Clock::now();
  const auto law = build_example_law(ExampleId::ex3);
  const Regime g = true_regime(law, RegimeKind::superoptimal_LA);
  const double truth = oracle_value(law, g);
  int covered = 0, inside_unit = 0;
  constexpr int kReplications = 100;
  for (int rep = 0; rep < kReplications; ++rep) {
    const Dataset d = draw_sample(law, 5000, 8000 + rep);
    EstimationConfig cfg;
    cfg.bootstrap_reps = 500;
    cfg.seed = 9000 + rep;
    const std::vector<Regime> regimes{g};
    const auto vb = bootstrap_ci(d, regimes, cfg);
    const auto& ci = vb.values[0].ci;
    covered += ci.contains(truth, 0.0);
    inside_unit += ci.lo >= 0.0 && ci.hi <= 1.0;
  }
  const double secs = seconds_since(t0);
  return {covered >= 90 && inside_unit == kReplications && secs < 600,
          "covered " + std::to_string(covered) + "/100, within [0,1] " + std::to_string(inside_unit) + "/100, " +
              fmt("%.1f", secs) + " s"};
}

// A9
Outcome superoptimality() {
  Rng rng = make_rng(99);
  int violations = 0;
  auto ge = [&](double a, double b) { violations += a < b - 1e-12; };
  for (int rep = 0; rep < 200; ++rep) {
    RandomLawOptions o;
    o.num_contexts = 1 + rep % 3;
    o.num_u = 2 + rep % 2;
    o.binary_outcome = rep % 4 != 3;
    const auto law = random_law(rng, o);
    const Regime sup = true_regime(law, RegimeKind::superoptimal_LA);
    const Regime opt = true_regime(law, RegimeKind::optimal_L);
    const Regime zsup = true_regime(law, RegimeKind::superoptimal_LAZ);
    const Regime obs = Regime::observed(law.num_contexts());
    for (std::size_t l = 0; l < law.num_contexts(); ++l) {
      ge(oracle_value(law, sup, l), oracle_value(law, opt, l));
      ge(oracle_value(law, sup, l), oracle_value(law, obs, l));
      ge(oracle_value(law, zsup, l), oracle_value(law, sup, l));
    }
    ge(oracle_value(law, sup), oracle_value(law, opt));
    ge(oracle_value(law, sup), oracle_value(law, obs));
    ge(oracle_value(law, zsup), oracle_value(law, sup));

    o.exchangeable = true;
    const auto ex = random_law(rng, o);
    const auto eobs = ObservedLaw::from_structural(ex);
    const auto psi = psi1_table(eobs);
    const Regime esup = superoptimal_rule(eobs, psi);
    const Regime eopt = optimal_rule(psi);
    for (std::size_t l = 0; l < ex.num_contexts(); ++l) {
      if (std::abs(psi[l][1] - psi[l][0]) <= kTieTolerance) continue;
      for (int ap = 0; ap < 2; ++ap) violations += esup.assign(ap, l) != eopt.assign(ap, l);
    }
  }
  return {violations == 0, "200 laws, violations " + std::to_string(violations)};
}

// A10
Outcome diagnostic() {
  std::ostringstream detail;
  bool pass = true;
  for (auto id : {ExampleId::ex1, ExampleId::ex2}) {
    const auto law = build_example_law(id);
    const auto obs = ObservedLaw::from_structural(law);
    const bool pop = diagnose_law(obs, Coarsening::trivial(law.schema())).any_violation();
    const Dataset d = draw_sample(law, 100000, 10);
    EstimationConfig cfg;
    cfg.bootstrap_reps = 200;
    cfg.seed = 10;
    const bool sample =
        diagnose_sample(d, true_regime(law, RegimeKind::superoptimal_LA), Coarsening::trivial(d.schema()), cfg)
            .any_violation();
    pass = pass && pop && sample;
    detail << (id == ExampleId::ex1 ? "ex1" : "ex2") << " population " << (pop ? "violated" : "contained")
           << ", sample " << (sample ? "violated" : "contained") << "; ";
  }
  Rng rng = make_rng(1010);
  int false_alarms = 0;
  for (int rep = 0; rep < 200; ++rep) {
    RandomLawOptions o;
    o.num_contexts = 1 + rep % 3;
    o.exchangeable = true;
    const auto law = random_law(rng, o);
    const auto obs = ObservedLaw::from_structural(law);
    false_alarms += diagnose_law(obs, Coarsening::identity(law.schema(), rep % 2 == 1)).any_violation();
  }
  detail << "false alarms " << false_alarms << "/200";
  return {pass && false_alarms == 0, detail.str()};
}

/// Three binary factors, an instrument, and an unmeasured binary U. Patients
/// with U = 1 benefit from treatment and the rest are harmed; clinicians
/// lean toward treating the U = 0 patients, so the natural choice is
/// informative but misdirected.
StructuralLaw icu_law() {
  CovariateSchema schema({{"sepsis", {"0", "1"}}, {"elderly", {"0", "1"}}, {"ventilated", {"0", "1"}}});
  const std::size_t nl = schema.num_contexts(), nu = 2;
  Rng rng = make_rng(1111);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> p_l(nl);
  for (auto& p : p_l) p = 0.5 + unif(rng);
  const double total = std::accumulate(p_l.begin(), p_l.end(), 0.0);
  for (auto& p : p_l) p /= total;
  std::vector<double> p_z1(nl, 0.5);
  std::vector<double> p_a1(nl * 2 * nu), mean_y(2 * nl * nu);
  for (std::size_t l = 0; l < nl; ++l) {
    const double strength = 0.35 + 0.1 * unif(rng);
    const double risk = 0.4 + 0.15 * unif(rng);
    for (std::size_t u = 0; u < nu; ++u) {
      const double base = u ? 0.15 : 0.35;
      for (int z = 0; z < 2; ++z) p_a1[(l * 2 + z) * nu + u] = base + z * strength;
      mean_y[(0 * nl + l) * nu + u] = risk;
      mean_y[(1 * nl + l) * nu + u] = risk + (u ? 0.35 : -0.3);
    }
  }
  return StructuralLaw(schema, {0.5, 0.5}, p_l, p_z1, p_a1, mean_y, {OutcomeNoise::Kind::bernoulli, 0.0});
}

// A11
Outcome icu_run() {
  const auto law = icu_law();
  const Dataset d = draw_sample(law, 13011, 13011);
  EstimationConfig cfg;
  cfg.bootstrap_reps = 500;
  cfg.seed = 8;
  const FitResult fit = fit_pipeline(d, cfg);
  const auto art = make_artifact(fit, d);
  std::cout << format_value_report(art.values);
  const auto& obs = art.values[0];
  const auto& opt = art.values[1];
  const auto& sup = art.values[2];
  auto ordered = [](const ValueEntry& lo, const ValueEntry& hi) {
    return lo.estimate <= hi.estimate || lo.ci.lo <= hi.ci.hi;
  };
  return {ordered(obs, opt) && ordered(opt, sup) && ordered(obs, sup),
          "observed " + format4(obs.estimate) + ", g_opt " + format4(opt.estimate) + ", g_sup " +
              format4(sup.estimate) + " (n=13011); oracle " +
              format4(oracle_value(law, Regime::observed(law.num_contexts()))) + " / " +
              format4(oracle_value(law, true_regime(law, RegimeKind::optimal_L))) + " / " +
              format4(oracle_value(law, true_regime(law, RegimeKind::superoptimal_LA)))};
}

}  // namespace

int main(int argc, char** argv) {
  // --expect-fail ID declares a criterion known to fail; the exit status is
  // zero only when the failing set is exactly the declared one.
  std::string data_dir;
  std::set<std::string> expected_failures;
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--data") data_dir = argv[i + 1];
    if (arg == "--expect-fail") expected_failures.insert(argv[i + 1]);
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"A1", [] { return example_values(ExampleId::ex1, 0.3, 0.0, 0.3); }},
      {"A2", [] { return example_values(ExampleId::ex2, -0.3, 0.0, 0.3); }},
      {"A3", example3},
      {"A4", [&] { return balke_pearl(data_dir); }},
      {"A5", identification},
      {"A6", consistency},
      {"A7", influence},
      {"A8", coverage},
      {"A9", superoptimality},
      {"A10", diagnostic},
      {"A11", icu_run},
  };
  std::set<std::string> failed;
  for (const auto& [name, run] : criteria) {
    Outcome r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    if (!r.pass) failed.insert(name);
    std::cout << name << ' ' << (r.pass ? "PASS" : "FAIL") << "  " << r.detail << std::endl;
  }
  std::cout << failed.size() << " of " << criteria.size() << " criteria failed";
  if (!expected_failures.empty()) {
    std::cout << " (declared known failures:";
    for (const auto& id : expected_failures) std::cout << ' ' << id;
    std::cout << ')';
  }
  std::cout << std::endl;
  return failed == expected_failures ? 0 : 1;
}
