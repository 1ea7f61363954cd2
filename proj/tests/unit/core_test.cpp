#include <sstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "superopt/dataset.hpp"
#include "superopt/regime.hpp"
#include "superopt/simulate.hpp"

using namespace superopt;
using ::testing::HasSubstr;

namespace {

RawTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    validate_dataset(parse(text));
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Dataset, ThreeValidRows) {
  const Dataset d = validate_dataset(parse("z,a,y,l1\n0,1,0.5,x\n1,0,1,y\n1,1,-2,x\n"));
  EXPECT_EQ(d.size(), 3u);
  EXPECT_TRUE(d.has_instrument());
  EXPECT_EQ(d.num_contexts(), 2u);
  EXPECT_FALSE(d.outcome_binary());
  const Observation r = d.row(2);
  EXPECT_EQ(r.z, 1);
  EXPECT_EQ(r.a, 1);
  EXPECT_DOUBLE_EQ(r.y, -2.0);
  EXPECT_EQ(d.schema().label(r.context), "l1=x");
}

TEST(Dataset, DomainViolationNamesRowAndColumn) {
  const std::string msg = error_of("z,a,y\n0,1,1\n1,2,0\n");
  EXPECT_THAT(msg, HasSubstr("row 2"));
  EXPECT_THAT(msg, HasSubstr("'a'"));
}

TEST(Dataset, ReportsEveryBadRow) {
  const std::string msg = error_of("z,a,y\n3,1,1\n1,0,nan\n");
  EXPECT_THAT(msg, HasSubstr("row 1, column 'z'"));
  EXPECT_THAT(msg, HasSubstr("row 2, column 'y'"));
}

TEST(Dataset, MissingColumn) {
  EXPECT_THAT(error_of("z,a\n0,1\n"), HasSubstr("'y'"));
  EXPECT_THAT(error_of("z,y\n0,1\n"), HasSubstr("'a'"));
}

TEST(Dataset, UnknownLevelAgainstDeclaredSchema) {
  const CovariateSchema schema({{"sex", {"f", "m"}}});
  try {
    validate_dataset(parse("a,y,sex\n0,1,f\n1,0,x\n"), schema);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_THAT(std::string(e.what()), HasSubstr("row 2"));
    EXPECT_THAT(std::string(e.what()), HasSubstr("sex"));
  }
}

TEST(Dataset, InstrumentOptionalUntilUsed) {
  const Dataset d = validate_dataset(parse("a,y\n0,1\n1,0\n"));
  EXPECT_FALSE(d.has_instrument());
  EXPECT_THROW(d.require_instrument("fit"), ValidationError);
}

TEST(Dataset, PreferenceArmRequiresReceivedEqualsIntent) {
  EXPECT_THAT(error_of("a,a_star,arm,y\n1,0,preference,1\n"), HasSubstr("row 1"));
  EXPECT_NO_THROW(validate_dataset(parse("a,a_star,arm,y\n1,1,preference,1\n0,1,assigned_1,0\n")));
}

TEST(Dataset, ColumnSummaries) {
  const Dataset d = validate_dataset(parse("z,a,y,g\n0,1,0.5,p\n1,1,2,q\n1,0,-1,q\n"));
  bool saw_y = false;
  for (const auto& s : d.summary()) {
    if (s.column == "y") {
      saw_y = true;
      EXPECT_DOUBLE_EQ(*s.min, -1.0);
      EXPECT_DOUBLE_EQ(*s.max, 2.0);
    }
    if (s.column == "g") {
      ASSERT_EQ(s.counts.size(), 2u);
      EXPECT_EQ(s.counts[1].count, 2u);
    }
  }
  EXPECT_TRUE(saw_y);
}

TEST(Dataset, Example1TreatmentRate) {
  const Dataset d = draw_sample(build_example_law(ExampleId::ex1), 1000, 11);
  double n1 = 0;
  for (auto a : d.a()) n1 += a;
  // P(A=1) = E[0.3U + 0.4 + 0.2Z] = 0.15 + 0.4 + 0.1.
  EXPECT_NEAR(n1 / 1000.0, 0.65, 0.05);
}

TEST(Dataset, CsvRoundTripIsExact) {
  ExampleParams p;
  p.with_w = true;
  const Dataset d = draw_sample(build_example_law(ExampleId::ex1, p), 500, 5);
  std::ostringstream out;
  write_dataset_csv(d, out);
  const Dataset back = validate_dataset(parse(out.str()), d.schema());
  EXPECT_TRUE(back == d);
  std::ostringstream again;
  write_dataset_csv(back, again);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Dataset, TrialRoundTrip) {
  const Dataset d = draw_sample(build_example_law(ExampleId::ex3), 300, 2, SampleMode::preference_trial);
  std::ostringstream out;
  write_dataset_csv(d, out);
  EXPECT_TRUE(validate_dataset(parse(out.str()), d.schema()) == d);
}

TEST(Dataset, FormatExactRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.125, 0.0}) {
    EXPECT_EQ(std::stod(format_exact(v)), v);
  }
}

TEST(Schema, MixedRadixEncoding) {
  const CovariateSchema s({{"a1", {"x", "y"}}, {"a2", {"p", "q", "r"}}});
  EXPECT_EQ(s.num_contexts(), 6u);
  for (std::size_t l = 0; l < 6; ++l) {
    const auto idx = s.decode(l);
    EXPECT_EQ(s.encode(idx), l);
    EXPECT_EQ(s.resolve(s.assignment(l)), l);
  }
  EXPECT_EQ(s.label(5), "a1=y,a2=r");
  EXPECT_THROW(s.resolve({{"a1", "x"}}), ValidationError);
  EXPECT_THROW(s.resolve({{"a1", "x"}, {"a2", "z"}}), ValidationError);
  EXPECT_EQ(CovariateSchema().label(0), "*");
}

TEST(Regime, ObservedReturnsNatural) {
  const Regime g = Regime::observed(4);
  for (std::size_t l = 0; l < 4; ++l) {
    for (int a = 0; a < 2; ++a) EXPECT_EQ(g.assign(a, l), a);
  }
}

TEST(Regime, TablesAreTotal) {
  EXPECT_THROW(Regime::superoptimal({0, 1, 1}), ValidationError);
  EXPECT_THROW(Regime::optimal({0, 2}), ValidationError);
  const Regime z = Regime::superoptimal_z({0, 1, 1, 0});
  EXPECT_EQ(z.assign(1, 0, 0), 1);
  EXPECT_EQ(z.assign(0, 0, 1), 1);
  EXPECT_THROW(z.assign(0, 0), ValidationError);
  EXPECT_THROW(Regime::optimal({1}).assign(0, 3), ValidationError);
}

TEST(Regime, ConstantAndOptimalIgnoreNatural) {
  const Regime c = Regime::constant(2, 1);
  EXPECT_EQ(c.assign(0, 1), 1);
  const Regime o = Regime::optimal({0, 1});
  EXPECT_EQ(o.assign(1, 0), 0);
  EXPECT_EQ(o.assign(0, 1), 1);
}

TEST(Interval, RequiresOrderedEnds) {
  EXPECT_THROW(IntervalBound(1.0, 0.0), std::invalid_argument);
  const IntervalBound b(0.0, 0.5);
  EXPECT_TRUE(b.contains(0.5));
  EXPECT_FALSE(b.contains(0.5 + 1e-9));
  EXPECT_TRUE(b.contains(0.5 + 1e-9, 1e-8));
}
