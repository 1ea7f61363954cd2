#include "superopt/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "superopt/estimate.hpp"
#include "superopt/nuisance.hpp"
#include "superopt/rng.hpp"

namespace superopt {

namespace {

constexpr int kMaxRedraws = 10;

std::vector<std::uint8_t> occupied_cells(const Dataset& data) {
  std::vector<std::uint8_t> occ(2 * data.num_contexts(), 0);
  if (!data.has_instrument()) return occ;
  const auto ctx = data.context();
  const auto z = data.z();
  for (std::size_t i = 0; i < data.size(); ++i) occ[ctx[i] * 2 + z[i]] = 1;
  return occ;
}

}  // namespace

ReplicateSet bootstrap_replicates(const Dataset& data, std::size_t reps, std::uint64_t seed,
                                  unsigned threads, const Statistic& stat) {
  if (data.size() == 0) throw ValidationError("cannot resample an empty dataset");
  const std::size_t n = data.size();
  const auto required = occupied_cells(data);
  std::vector<std::optional<std::vector<double>>> slots(reps);
  std::vector<int> redraws(reps, 0);

  parallel_for(reps, [&](std::size_t b) {
    Rng rng = make_rng(derive_seed(seed, b));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> rows(n);
    for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
      for (auto& r : rows) r = pick(rng);
      const Dataset sample = data.subset(rows);
      if (data.has_instrument()) {
        const auto got = occupied_cells(sample);
        bool ok = true;
        for (std::size_t k = 0; k < got.size(); ++k) ok = ok && (got[k] || !required[k]);
        if (!ok) {
          ++redraws[b];
          continue;
        }
      }
      try {
        slots[b] = stat(sample);
        return;
      } catch (const IdentificationError&) {
        ++redraws[b];
      }
    }
  }, threads);

  ReplicateSet out;
  for (std::size_t b = 0; b < reps; ++b) {
    out.redraws += static_cast<std::size_t>(redraws[b]);
    if (slots[b]) {
      out.values.push_back(std::move(*slots[b]));
    } else {
      ++out.dropped;
    }
  }
  if (out.dropped * 100 > reps) {
    throw NumericalError("bootstrap dropped " + std::to_string(out.dropped) + " of " + std::to_string(reps) +
                         " replicates (limit 1%)");
  }
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

IntervalBound percentile_interval(std::span<const double> values, double level,
                                  std::optional<double> lower, std::optional<double> upper) {
  const double alpha = 1.0 - level;
  std::vector<double> v(values.begin(), values.end());
  double lo = quantile(v, alpha / 2.0);
  double hi = quantile(std::move(v), 1.0 - alpha / 2.0);
  if (lower) {
    lo = std::max(lo, *lower);
    hi = std::max(hi, *lower);
  }
  if (upper) {
    lo = std::min(lo, *upper);
    hi = std::min(hi, *upper);
  }
  return {lo, hi};
}

ValueBootstrap bootstrap_ci(const Dataset& data, std::span<const Regime> regimes,
                            const EstimationConfig& cfg) {
  cfg.validate();
  const std::vector<Regime> fixed(regimes.begin(), regimes.end());
  auto values_on = [&](const Dataset& d) {
    const NuisanceSet nuis = fit_nuisances(d, cfg);
    std::vector<double> v;
    v.reserve(fixed.size());
    for (const auto& g : fixed) v.push_back(estimate_value(d, g, nuis.tables, cfg));
    return v;
  };

  ValueBootstrap out;
  out.reps = cfg.bootstrap_reps;
  const std::vector<double> point = values_on(data);
  const ReplicateSet rs = bootstrap_replicates(data, cfg.bootstrap_reps, cfg.seed, cfg.threads, values_on);
  out.dropped = rs.dropped;
  if (rs.dropped > 0) {
    out.warnings.push_back("bootstrap dropped " + std::to_string(rs.dropped) + " degenerate replicates");
  }
  std::optional<double> lower, upper;
  if (data.outcome_binary()) {
    lower = 0.0;
    upper = 1.0;
  }
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    std::vector<double> col;
    col.reserve(rs.values.size());
    for (const auto& r : rs.values) col.push_back(r[k]);
    ValueInterval vi;
    vi.estimate = point[k];
    if (lower && (vi.estimate < *lower || vi.estimate > *upper)) {
      vi.estimate = std::clamp(vi.estimate, *lower, *upper);
      vi.clamped = true;
    }
    vi.ci = percentile_interval(col, 0.95, lower, upper);
    if (!vi.ci.contains(vi.estimate)) {
      vi.ci = {std::min(vi.ci.lo, vi.estimate), std::max(vi.ci.hi, vi.estimate)};
      vi.widened = true;
    }
    out.values.push_back(vi);
  }
  return out;
}

}  // namespace superopt
