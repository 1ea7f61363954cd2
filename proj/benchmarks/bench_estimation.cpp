#include <benchmark/benchmark.h>

#include "superopt/bootstrap.hpp"
#include "superopt/bounds.hpp"
#include "superopt/estimate.hpp"
#include "superopt/identify.hpp"
#include "superopt/simulate.hpp"

using namespace superopt;

namespace {

StructuralLaw bench_law(std::size_t contexts) {
  Rng rng = make_rng(17);
  RandomLawOptions o;
  o.num_contexts = contexts;
  return random_law(rng, o);
}

void BM_DrawSample(benchmark::State& state) {
  const auto law = bench_law(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(draw_sample(law, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DrawSample)->Arg(10000)->Arg(100000);

void BM_FitNuisances(benchmark::State& state) {
  const auto d = draw_sample(bench_law(4), static_cast<std::size_t>(state.range(0)), 2);
  EstimationConfig cfg;
  cfg.design = state.range(1) ? Design::main_effects : Design::saturated;
  for (auto _ : state) benchmark::DoNotOptimize(fit_nuisances(d, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitNuisances)->Args({10000, 0})->Args({100000, 0})->Args({10000, 1})->Args({100000, 1});

void BM_ValueBootstrap(benchmark::State& state) {
  const auto law = bench_law(4);
  const auto d = draw_sample(law, 5000, 3);
  EstimationConfig cfg;
  cfg.bootstrap_reps = static_cast<std::size_t>(state.range(0));
  cfg.threads = 1;
  const std::vector<Regime> regimes{true_regime(law, RegimeKind::superoptimal_LA)};
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_ci(d, regimes, cfg));
}
BENCHMARK(BM_ValueBootstrap)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_IdentifyRegimes(benchmark::State& state) {
  const auto obs = ObservedLaw::from_structural(bench_law(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    const auto psi = psi1_table(obs);
    benchmark::DoNotOptimize(superoptimal_rule(obs, psi));
    benchmark::DoNotOptimize(lz_superoptimal_rule(obs, psi));
  }
}
BENCHMARK(BM_IdentifyRegimes)->Arg(4)->Arg(16);

void BM_BalkePearl(benchmark::State& state) {
  // n[y][a][z]
  TrialCounts c;
  c.n[0][0] = {74, 34};
  c.n[0][1] = {0, 12};
  c.n[1][0] = {11514, 2385};
  c.n[1][1] = {0, 9663};
  for (auto _ : state) {
    benchmark::DoNotOptimize(balke_pearl_ate_bounds(c));
    benchmark::DoNotOptimize(natural_att_bounds(c, 0));
  }
}
BENCHMARK(BM_BalkePearl);

}  // namespace

BENCHMARK_MAIN();
