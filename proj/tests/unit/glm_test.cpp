#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "superopt/glm.hpp"
#include "superopt/rng.hpp"

using namespace superopt;

namespace {

DesignMatrix intercept_only(std::size_t n) {
  DesignMatrix x;
  x.rows = n;
  x.cols = 1;
  x.values.assign(n, 1.0);
  x.names = {"(intercept)"};
  return x;
}

}  // namespace

TEST(Logit, InterceptOnlyIsSampleMean) {
  Rng rng = make_rng(3);
  std::bernoulli_distribution b(0.3);
  std::vector<double> y(1000);
  double s = 0;
  for (auto& v : y) s += (v = b(rng));
  const auto x = intercept_only(y.size());
  const GlmFit fit = fit_logit(x, y);
  ASSERT_TRUE(fit.converged);
  const double mean = s / 1000.0;
  EXPECT_NEAR(fit.predict(x.row(0)), mean, 1e-8);
  EXPECT_LE(std::abs(fit.predict(x.row(0)) - 0.3), 3 * std::sqrt(0.21 / 1000));
}

TEST(Logit, SaturatedReproducesCellMeans) {
  const CovariateSchema schema({{"g", {"a", "b", "c"}}, {"h", {"x", "y"}}});
  Rng rng = make_rng(8);
  std::uniform_int_distribution<std::uint32_t> ctx(0, 5);
  std::vector<std::uint32_t> contexts(3000);
  std::vector<double> y(3000);
  std::vector<double> sum(6, 0.0), cnt(6, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    contexts[i] = ctx(rng);
    std::bernoulli_distribution b(0.1 + 0.12 * contexts[i]);
    y[i] = b(rng);
    sum[contexts[i]] += y[i];
    cnt[contexts[i]] += 1;
  }
  for (auto design : {Design::saturated}) {
    const auto x = design_matrix(schema, contexts, design);
    const GlmFit fit = fit_logit(x, y);
    ASSERT_TRUE(fit.converged);
    for (std::size_t l = 0; l < 6; ++l) {
      EXPECT_NEAR(fit.predict(design_row(schema, l, design)), sum[l] / cnt[l], 1e-8);
    }
  }
}

TEST(Logit, MainEffectsMatchMarginsOnAdditiveData) {
  const CovariateSchema schema({{"g", {"a", "b"}}, {"h", {"x", "y"}}});
  EXPECT_EQ(design_names(schema, Design::main_effects),
            (std::vector<std::string>{"(intercept)", "g=b", "h=y"}));
  const auto row = design_row(schema, 3, Design::main_effects);
  EXPECT_EQ(row, (std::vector<double>{1, 1, 1}));
}

TEST(Logit, SeparationFlagged) {
  DesignMatrix x;
  x.rows = 4;
  x.cols = 2;
  x.values = {1, -2, 1, -1, 1, 1, 1, 2};
  const std::vector<double> y{0, 0, 1, 1};
  const GlmFit fit = fit_logit(x, y);
  EXPECT_TRUE(fit.separated);
  for (double b : fit.coefficients) EXPECT_TRUE(std::isfinite(b));
}

TEST(Logit, DevianceDecreasesOverIterations) {
  Rng rng = make_rng(12);
  std::normal_distribution<double> nz;
  DesignMatrix x;
  x.rows = 500;
  x.cols = 2;
  std::vector<double> y(500);
  for (std::size_t i = 0; i < 500; ++i) {
    const double v = nz(rng);
    x.values.push_back(1.0);
    x.values.push_back(v);
    std::bernoulli_distribution b(1.0 / (1.0 + std::exp(-(0.5 + 1.5 * v))));
    y[i] = b(rng);
  }
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 6; ++it) {
    GlmOptions o;
    o.max_iter = it;
    const GlmFit f = fit_logit(x, y, o);
    EXPECT_LE(f.deviance, previous + 1e-9);
    previous = f.deviance;
  }
  const GlmFit full = fit_logit(x, y);
  EXPECT_TRUE(full.converged);
  EXPECT_NEAR(full.coefficients[1], 1.5, 0.5);
}

TEST(Logit, FractionalResponses) {
  const auto x = intercept_only(4);
  const std::vector<double> y{0.25, 0.5, 0.75, 0.5};
  const GlmFit fit = fit_logit(x, y);
  EXPECT_NEAR(fit.predict(x.row(0)), 0.5, 1e-10);
}

TEST(Gaussian, LeastSquares) {
  const auto x = intercept_only(3);
  const std::vector<double> y{-1.0, 2.0, 5.0};
  const GlmFit fit = fit_glm(x, y, Family::gaussian);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.predict(x.row(0)), 2.0, 1e-12);
}

TEST(DesignParse, Names) {
  EXPECT_EQ(parse_design("saturated"), Design::saturated);
  EXPECT_EQ(parse_design("main_effects"), Design::main_effects);
  EXPECT_FALSE(parse_design("cubic"));
}
