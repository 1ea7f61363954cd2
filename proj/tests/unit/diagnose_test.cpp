#include <gtest/gtest.h>

#include "superopt/diagnose.hpp"
#include "superopt/simulate.hpp"

using namespace superopt;

namespace {

ObservedLaw observed(ExampleId id) { return ObservedLaw::from_structural(build_example_law(id)); }

/// Two contexts over a binary U: natural treatment tracks U in context 0
/// (ex1-style confounding) and ignores it in context 1.
StructuralLaw half_confounded() {
  const CovariateSchema s({{"site", {"a", "b"}}});
  // p_a1 indexed [(l*2+z)*|U| + u]; mean_y indexed [(a*|L|+l)*|U| + u].
  const std::vector<double> pa{0.4, 0.7, 0.6, 0.9,   // l=0: 0.3U + 0.4 + 0.2z
                               0.3, 0.3, 0.6, 0.6};  // l=1: no U dependence
  const std::vector<double> my{1.0, -1.0, 0.2, 0.4,   // a=0
                               -1.0, 1.0, 0.5, 0.1};  // a=1
  return StructuralLaw(s, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}, pa, my, {OutcomeNoise::Kind::gaussian, 1.0});
}

}  // namespace

TEST(Intervals, SingleContext) {
  const Psi1Table psi{{0.4, 0.5}};
  const auto iv = confounding_intervals(psi, {0.3, 0.7}, Coarsening::trivial(CovariateSchema()));
  ASSERT_EQ(iv.size(), 1u);
  EXPECT_NEAR(iv[0].lo, 0.4, 1e-15);
  EXPECT_NEAR(iv[0].hi, 0.5, 1e-15);
}

TEST(Intervals, WeightsWithinStratum) {
  const CovariateSchema s({{"g", {"x", "y"}}});
  const Psi1Table psi{{0.0, 1.0}, {0.5, 0.2}};
  // P(l=0) = 0.25, P(l=1) = 0.75.
  const std::vector<double> mass{0.1, 0.15, 0.5, 0.25};
  const auto iv = confounding_intervals(psi, mass, Coarsening::trivial(s));
  EXPECT_NEAR(iv[0].lo, 0.25 * 0.0 + 0.75 * 0.2, 1e-15);
  EXPECT_NEAR(iv[0].hi, 0.25 * 1.0 + 0.75 * 0.5, 1e-15);
  const auto by_a = confounding_intervals(psi, mass, Coarsening::trivial(s, true));
  ASSERT_EQ(by_a.size(), 2u);
  // Stratum A=0 weights P(l | A=0) = (0.1, 0.5)/0.6.
  EXPECT_NEAR(by_a[0].hi, (0.1 * 1.0 + 0.5 * 0.5) / 0.6, 1e-15);
}

TEST(Intervals, EmptyStratum) {
  const CovariateSchema s({{"g", {"x", "y"}}});
  const Psi1Table psi{{0.0, 1.0}, {0.5, 0.2}};
  EXPECT_THROW(confounding_intervals(psi, {0.5, 0.5, 0.0, 0.0}, Coarsening::identity(s)), IdentificationError);
}

TEST(Population, Example1Violated) {
  const auto r = diagnose_law(observed(ExampleId::ex1), Coarsening::trivial(CovariateSchema()));
  ASSERT_EQ(r.strata.size(), 1u);
  EXPECT_NEAR(r.strata[0].interval.lo, 0.0, 1e-12);
  EXPECT_NEAR(r.strata[0].interval.hi, 0.0, 1e-12);
  EXPECT_NEAR(r.strata[0].value_sup, 0.3, 1e-12);
  EXPECT_EQ(r.strata[0].value_verdict, Verdict::violated);
  EXPECT_TRUE(r.any_violation());
}

TEST(Population, Example2Violated) {
  const auto r = diagnose_law(observed(ExampleId::ex2), Coarsening::trivial(CovariateSchema(), true));
  EXPECT_TRUE(r.any_violation());
}

TEST(Population, Example3Contained) {
  // Example 3's natural treatment depends on U, but the interval is wide
  // enough to hold both tested quantities.
  const auto r = diagnose_law(observed(ExampleId::ex3), Coarsening::trivial(CovariateSchema()));
  EXPECT_NEAR(r.strata[0].interval.lo, 0.4, 1e-12);
  EXPECT_NEAR(r.strata[0].interval.hi, 0.5, 1e-12);
}

TEST(Population, ReportsOnlyViolatedStratum) {
  const auto law = half_confounded();
  const auto r = diagnose_law(ObservedLaw::from_structural(law), Coarsening::identity(law.schema()));
  ASSERT_EQ(r.strata.size(), 2u);
  EXPECT_EQ(r.strata[0].value_verdict, Verdict::violated);
  EXPECT_EQ(r.strata[1].mean_verdict, Verdict::contained);
  EXPECT_EQ(r.strata[1].value_verdict, Verdict::contained);
  EXPECT_EQ(r.strata[0].label, "site=a");
}

TEST(Population, ExchangeableContained) {
  Rng rng = make_rng(8);
  RandomLawOptions o;
  o.exchangeable = true;
  o.num_contexts = 3;
  for (int rep = 0; rep < 20; ++rep) {
    const auto law = random_law(rng, o);
    const auto obs = ObservedLaw::from_structural(law);
    for (bool split : {false, true}) {
      EXPECT_FALSE(diagnose_law(obs, Coarsening::identity(law.schema(), split)).any_violation());
      EXPECT_FALSE(diagnose_law(obs, Coarsening::trivial(law.schema(), split)).any_violation());
    }
  }
}

TEST(CiRule, Conservative) {
  const IntervalBound lower(0.1, 0.2), upper(0.4, 0.5);
  EXPECT_EQ(check_containment_ci(lower, upper, {0.0, 0.09}), Verdict::violated);
  EXPECT_EQ(check_containment_ci(lower, upper, {0.51, 0.6}), Verdict::violated);
  EXPECT_EQ(check_containment_ci(lower, upper, {0.0, 0.1}), Verdict::contained);
  EXPECT_EQ(check_containment_ci(lower, upper, {0.45, 0.7}), Verdict::contained);
}

TEST(Coarsenings, ByCovariate) {
  const CovariateSchema s({{"g", {"x", "y"}}, {"h", {"p", "q", "r"}}});
  const auto c = Coarsening::by_covariate(s, "h", true);
  EXPECT_EQ(c.num_strata(), 3u);
  EXPECT_EQ(c.context_map[5], 2u);
  EXPECT_EQ(strata(c).size(), 6u);
  EXPECT_THROW(Coarsening::by_covariate(s, "k"), ValidationError);
}

TEST(Sample, Example1DetectedWithCiRule) {
  const auto d = draw_sample(build_example_law(ExampleId::ex1), 100000, 3);
  EstimationConfig cfg;
  cfg.bootstrap_reps = 200;
  const auto law = build_example_law(ExampleId::ex1);
  const auto r = diagnose_sample(d, true_regime(law, RegimeKind::superoptimal_LA),
                                 Coarsening::trivial(d.schema()), cfg);
  EXPECT_TRUE(r.any_violation());
  const auto& s = r.strata[0];
  ASSERT_TRUE(s.value_sup_ci && s.upper_ci);
  EXPECT_GT(s.value_sup_ci->lo, s.upper_ci->hi);
}

TEST(Report, JsonAndTable) {
  const auto r = diagnose_law(observed(ExampleId::ex1), Coarsening::trivial(CovariateSchema(), true));
  const auto j = to_json(r);
  EXPECT_TRUE(j["violation"].get<bool>());
  EXPECT_EQ(j["strata"].size(), 2u);
  EXPECT_EQ(j["strata"][1]["b"], 1);
  const std::string table = format_diagnostic_table(r);
  EXPECT_NE(table.find("violated"), std::string::npos);
  EXPECT_NE(table.find("* | A=1"), std::string::npos);
}
