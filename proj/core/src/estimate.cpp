#include "superopt/estimate.hpp"

#include <algorithm>
#include <numeric>

#include "superopt/types.hpp"

namespace superopt {

DeltaEstimate estimate_delta(const Dataset& train, const EstimationConfig& cfg) {
  train.require_instrument("estimating instrument strength");
  for (int z = 0; z < 2; ++z) {
    const auto zc = train.z();
    if (std::none_of(zc.begin(), zc.end(), [z](std::uint8_t v) { return v == z; })) {
      throw IdentificationError("instrument stratum z=" + std::to_string(z) + " is empty");
    }
  }
  const NuisanceSet n = fit_nuisances(train, cfg);
  return {n.tables.delta, n.delta_floored};
}

Psi1Table estimate_psi1(const Dataset& train, const DeltaEstimate& delta, const EstimationConfig& cfg) {
  NuisanceSet n = fit_nuisances(train, cfg);
  if (delta.delta.size() != n.tables.num_contexts) throw ValidationError("delta table has the wrong size");
  n.tables.delta = delta.delta;
  n.tables.refresh_psi1();
  return n.tables.psi1;
}

NaturalMeans plugin_natural_means(const NuisanceTables& t, const EstimationConfig& cfg) {
  NaturalMeans m(t.num_contexts);
  for (std::size_t l = 0; l < t.num_contexts; ++l) {
    for (int ap = 0; ap < 2; ++ap) {
      for (int a = 0; a < 2; ++a) {
        m[l][ap][a] = a == ap ? t.mean_al(a, l)
                              : (t.psi1[l][a] - t.mean_al(a, l) * t.p_a_l(a, l)) /
                                    std::max(t.p_a_l(ap, l), cfg.propensity_clip);
      }
    }
  }
  return m;
}

NaturalMeans plugin_lz_natural_means(const NuisanceTables& t, const EstimationConfig& cfg) {
  NaturalMeans m(2 * t.num_contexts);
  for (std::size_t l = 0; l < t.num_contexts; ++l) {
    for (int z = 0; z < 2; ++z) {
      for (int ap = 0; ap < 2; ++ap) {
        for (int a = 0; a < 2; ++a) {
          m[l * 2 + z][ap][a] = a == ap ? t.mean_azl(a, z, l)
                                        : (t.psi1[l][a] - t.mean_azl(a, z, l) * t.p_a_zl(a, z, l)) /
                                              std::max(t.p_a_zl(ap, z, l), cfg.propensity_clip);
        }
      }
    }
  }
  return m;
}

Regime estimate_regime(const NuisanceTables& t, RegimeKind kind, const EstimationConfig& cfg) {
  const std::size_t nl = t.num_contexts;
  switch (kind) {
    case RegimeKind::optimal_L: {
      std::vector<std::uint8_t> table(nl);
      for (std::size_t l = 0; l < nl; ++l) {
        table[l] = static_cast<std::uint8_t>(argmax_binary(t.psi1[l][0], t.psi1[l][1], 1));
      }
      return Regime::optimal(std::move(table));
    }
    case RegimeKind::superoptimal_LA: {
      std::vector<std::uint8_t> table(2 * nl);
      for (std::size_t l = 0; l < nl; ++l) {
        for (int ap = 0; ap < 2; ++ap) {
          const bool keep = t.mean_y_l[l] - t.psi1[l][1 - ap] >= -kTieTolerance;
          table[l * 2 + ap] = static_cast<std::uint8_t>(keep ? ap : 1 - ap);
        }
      }
      return Regime::superoptimal(std::move(table));
    }
    case RegimeKind::superoptimal_LAZ: {
      const auto m = plugin_lz_natural_means(t, cfg);
      std::vector<std::uint8_t> table(4 * nl);
      for (std::size_t k = 0; k < m.size(); ++k) {
        for (int ap = 0; ap < 2; ++ap) {
          table[k * 2 + ap] = static_cast<std::uint8_t>(argmax_binary(m[k][ap][0], m[k][ap][1], ap));
        }
      }
      return Regime::superoptimal_z(std::move(table));
    }
    case RegimeKind::observed: return Regime::observed(nl);
    case RegimeKind::explicit_table: break;
  }
  throw ValidationError("cannot estimate an explicit regime");
}

RegimeSet estimate_regimes(const NuisanceTables& t, const EstimationConfig& cfg) {
  RegimeSet r;
  r.optimal = estimate_regime(t, RegimeKind::optimal_L, cfg);
  r.superoptimal = estimate_regime(t, RegimeKind::superoptimal_LA, cfg);
  r.superoptimal_z = estimate_regime(t, RegimeKind::superoptimal_LAZ, cfg);
  r.natural_means = plugin_natural_means(t, cfg);
  r.gamma = gamma_map(r.natural_means);
  return r;
}

double value_override_term(const NuisanceTables& t, int a, std::size_t l, const EstimationConfig& cfg) {
  const int b = 1 - a;
  return (t.psi1[l][b] - t.mean_al(b, l) * t.p_a_l(b, l)) / std::max(t.p_a_l(a, l), cfg.propensity_clip);
}

std::vector<double> value_contributions(const Dataset& eval, const Regime& regime,
                                        const NuisanceTables& t, const EstimationConfig& cfg) {
  if (regime.num_contexts() != eval.num_contexts() || t.num_contexts != eval.num_contexts()) {
    throw ValidationError("regime, nuisances and data disagree on the context space");
  }
  if (eval.kind() != RecordKind::observational) throw ValidationError("value estimation needs observational records");
  if (regime.uses_instrument()) eval.require_instrument("valuing an instrument-keyed regime");
  const std::size_t nl = t.num_contexts;
  // Override terms per (l, a) and per (l, z, a).
  std::vector<double> v(2 * nl), vz(4 * nl);
  for (std::size_t l = 0; l < nl; ++l) {
    for (int a = 0; a < 2; ++a) {
      v[l * 2 + a] = value_override_term(t, a, l, cfg);
      for (int z = 0; z < 2; ++z) {
        const int b = 1 - a;
        vz[(l * 2 + z) * 2 + a] = (t.psi1[l][b] - t.mean_azl(b, z, l) * t.p_a_zl(b, z, l)) /
                                  std::max(t.p_a_zl(a, z, l), cfg.propensity_clip);
      }
    }
  }
  const auto ctx = eval.context();
  const auto a = eval.a();
  const auto y = eval.y();
  const auto zc = eval.z();
  const bool by_z = regime.uses_instrument();
  const bool use_y = cfg.value_form == ValueForm::alternative;
  std::vector<double> out(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) {
    const std::size_t l = ctx[i];
    const int ai = a[i];
    if (by_z) {
      const int z = zc[i];
      const int g = regime.assign(ai, l, z);
      out[i] = g != ai ? vz[(l * 2 + z) * 2 + ai] : (use_y ? y[i] : t.mean_azl(ai, z, l));
    } else {
      const int g = regime.assign(ai, l);
      out[i] = g != ai ? v[l * 2 + ai] : (use_y ? y[i] : t.mean_al(ai, l));
    }
  }
  return out;
}

double estimate_value(const Dataset& eval, const Regime& regime, const NuisanceTables& t,
                      const EstimationConfig& cfg) {
  const auto c = value_contributions(eval, regime, t, cfg);
  if (c.empty()) throw ValidationError("cannot value a regime on an empty dataset");
  return std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
}

}  // namespace superopt
