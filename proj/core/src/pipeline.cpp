#include "superopt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "superopt/rng.hpp"

namespace superopt {

namespace {
// Stream index reserved for the split so it never collides with bootstrap
// replicate streams.
constexpr std::uint64_t kSplitStream = 0xC0FFEE5EEDULL;
}  // namespace

SplitData split_dataset(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("split fraction must lie in (0,1]");
  if (fraction == 1.0) return {data, data};
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) throw ValidationError("split leaves one side empty");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = make_rng(derive_seed(seed, kSplitStream));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> train(perm.begin(), perm.begin() + n_train);
  std::vector<std::size_t> eval(perm.begin() + n_train, perm.end());
  std::sort(train.begin(), train.end());
  std::sort(eval.begin(), eval.end());
  return {data.subset(train), data.subset(eval)};
}

FitResult fit_pipeline(const Dataset& data, const EstimationConfig& cfg) {
  cfg.validate();
  data.require_instrument("fit");
  FitResult r;
  r.config = cfg;
  r.fingerprint = fingerprint(data);
  r.n_rows = data.size();

  const SplitData split = split_dataset(data, cfg.split_fraction, cfg.seed);
  r.n_train = split.train.size();
  r.n_eval = split.eval.size();

  r.train_nuisances = fit_nuisances(split.train, cfg, true);
  r.regimes = estimate_regimes(r.train_nuisances.tables, cfg);
  r.support.assign(data.num_contexts(), 0);
  for (auto l : split.train.context()) ++r.support[l];

  const std::vector<Regime> regimes{Regime::observed(data.num_contexts()), r.regimes.optimal,
                                    r.regimes.superoptimal, r.regimes.superoptimal_z};
  r.values = bootstrap_ci(split.eval, regimes, cfg);

  for (const auto& w : r.train_nuisances.warnings) r.warnings.push_back("train: " + w);
  for (const auto& w : r.values.warnings) r.warnings.push_back("eval: " + w);
  for (std::size_t k = 0; k < r.values.values.size(); ++k) {
    const auto& v = r.values.values[k];
    if (v.clamped) r.warnings.push_back(std::string(kReportRegimes[k]) + ": point estimate clamped to [0,1]");
    if (v.widened) r.warnings.push_back(std::string(kReportRegimes[k]) + ": interval widened to include the estimate");
  }
  return r;
}

}  // namespace superopt
