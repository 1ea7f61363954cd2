#include <atomic>
#include <cmath>

#include <gtest/gtest.h>

#include "superopt/bootstrap.hpp"
#include "superopt/simulate.hpp"

using namespace superopt;

namespace {

Statistic mean_of_y() {
  return [](const Dataset& d) {
    double s = 0;
    for (double y : d.y()) s += y;
    return std::vector<double>{s / static_cast<double>(d.size())};
  };
}

}  // namespace

TEST(Quantile, Type7) {
  // Reference values from the linear-interpolation definition
  // h = (n−1)p, x[floor h] + (h − floor h)(x[floor h + 1] − x[floor h]).
  const std::vector<double> v{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile({7.0}, 0.3), 7.0);
  EXPECT_THROW(quantile({}, 0.5), ValidationError);
}

TEST(Percentile, Truncation) {
  std::vector<double> v;
  for (int i = 0; i <= 100; ++i) v.push_back(-0.5 + i * 0.02);
  const auto raw = percentile_interval(v);
  EXPECT_NEAR(raw.lo, -0.45, 1e-12);
  EXPECT_NEAR(raw.hi, 1.45, 1e-12);
  const auto cut = percentile_interval(v, 0.95, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(cut.lo, 0.0);
  EXPECT_DOUBLE_EQ(cut.hi, 1.0);
}

TEST(Replicates, DeterministicAndThreadIndependent) {
  const auto d = draw_sample(build_example_law(ExampleId::ex3), 500, 1);
  const auto a = bootstrap_replicates(d, 200, 9, 1, mean_of_y());
  const auto b = bootstrap_replicates(d, 200, 9, 4, mean_of_y());
  EXPECT_EQ(a.values, b.values);
  const auto c = bootstrap_replicates(d, 200, 10, 1, mean_of_y());
  EXPECT_NE(a.values, c.values);
}

TEST(Replicates, DegenerateDrawsAreRedrawn) {
  const auto d = draw_sample(build_example_law(ExampleId::ex3), 200, 2);
  std::atomic<int> calls{0};
  const Statistic flaky = [&](const Dataset& s) {
    if (calls++ % 3 == 0) throw IdentificationError("degenerate");
    return mean_of_y()(s);
  };
  const auto r = bootstrap_replicates(d, 100, 3, 1, flaky);
  EXPECT_EQ(r.values.size(), 100u);
  EXPECT_EQ(r.dropped, 0u);
  EXPECT_GT(r.redraws, 0u);
}

TEST(Replicates, TooManyDropsFail) {
  const auto d = draw_sample(build_example_law(ExampleId::ex3), 50, 2);
  const Statistic never = [](const Dataset&) -> std::vector<double> { throw IdentificationError("always"); };
  EXPECT_THROW(bootstrap_replicates(d, 100, 3, 1, never), NumericalError);
}

TEST(Replicates, KeepsRareInstrumentCells) {
  // One row carries z = 1: every accepted resample must contain it.
  DatasetColumns c;
  for (int i = 0; i < 30; ++i) {
    c.z.push_back(i == 0 ? 1 : 0);
    c.a.push_back(static_cast<std::uint8_t>(i % 2));
    c.context.push_back(0);
    c.y.push_back(i % 3 == 0);
  }
  const Dataset d(CovariateSchema(), RecordKind::observational, true, true, std::move(c));
  const Statistic has_z1 = [](const Dataset& s) {
    double k = 0;
    for (auto z : s.z()) k += z;
    return std::vector<double>{k};
  };
  const auto r = bootstrap_replicates(d, 20, 1, 1, has_z1);
  for (const auto& v : r.values) EXPECT_GE(v[0], 1.0);
}

TEST(ValueCi, BinaryOutcomeStaysInUnitInterval) {
  const auto law = build_example_law(ExampleId::ex3);
  const auto d = draw_sample(law, 2000, 4);
  EstimationConfig cfg;
  cfg.bootstrap_reps = 200;
  const std::vector<Regime> regimes{Regime::observed(1), true_regime(law, RegimeKind::superoptimal_LA),
                                    true_regime(law, RegimeKind::superoptimal_LAZ)};
  const auto out = bootstrap_ci(d, regimes, cfg);
  ASSERT_EQ(out.values.size(), 3u);
  for (const auto& v : out.values) {
    EXPECT_GE(v.ci.lo, 0.0);
    EXPECT_LE(v.ci.hi, 1.0);
    EXPECT_TRUE(v.ci.contains(v.estimate));
  }
  const auto again = bootstrap_ci(d, regimes, cfg);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(again.values[k].ci.lo, out.values[k].ci.lo);
    EXPECT_EQ(again.values[k].ci.hi, out.values[k].ci.hi);
  }
}

TEST(ValueCi, ContinuousOutcomeNotTruncated) {
  const auto law = build_example_law(ExampleId::ex1);
  const auto d = draw_sample(law, 2000, 5);
  EstimationConfig cfg;
  cfg.bootstrap_reps = 100;
  const std::vector<Regime> regimes{Regime::constant(1, 0)};
  const auto out = bootstrap_ci(d, regimes, cfg);
  EXPECT_LT(out.values[0].ci.lo, 0.0);
}
