#include "superopt/identify.hpp"

#include <cmath>
#include <string>

#include "superopt/types.hpp"

namespace superopt {

using nlohmann::json;

ObservedLaw::ObservedLaw(CovariateSchema schema, bool has_instrument, std::vector<double> p_l,
                         std::vector<double> f1, std::vector<double> p_a1_given_zl,
                         std::vector<double> mean_y_given_azl)
    : schema_(std::move(schema)),
      has_instrument_(has_instrument),
      p_l_(std::move(p_l)),
      f1_(std::move(f1)),
      p_a1_(std::move(p_a1_given_zl)),
      mean_y_(std::move(mean_y_given_azl)) {
  const std::size_t nl = p_l_.size();
  if (nl == 0 || nl != schema_.num_contexts()) {
    throw ValidationError("observed law needs one P(L=l) per covariate context");
  }
  if (f1_.size() != nl || p_a1_.size() != 2 * nl || mean_y_.size() != 4 * nl) {
    throw ValidationError("observed law arrays have the wrong size");
  }
  double s = 0.0;
  for (double p : p_l_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("P(L=l) outside [0,1]");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ValidationError("P(L=l) does not sum to 1");
  for (double p : f1_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("P(Z=1|l) outside [0,1]");
  }
  if (!has_instrument_) {
    for (double p : f1_) {
      if (p != 0.0) throw ValidationError("a law without an instrument must put Z=0 everywhere");
    }
  }
  for (double p : p_a1_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("P(A=1|z,l) outside [0,1]");
  }
  for (double m : mean_y_) {
    if (!std::isfinite(m)) throw ValidationError("E(Y|a,z,l) must be finite");
  }
}

ObservedLaw ObservedLaw::from_structural(const StructuralLaw& law) {
  const std::size_t nl = law.num_contexts(), nu = law.num_u();
  std::vector<double> pa(2 * nl, 0.0), my(4 * nl, 0.0);
  for (std::size_t l = 0; l < nl; ++l) {
    for (int z = 0; z < 2; ++z) {
      for (int a = 0; a < 2; ++a) {
        double mass = 0.0, num = 0.0;
        for (std::size_t u = 0; u < nu; ++u) {
          const double w = law.p_u(u) * law.p_a(a, z, l, u);
          mass += w;
          num += w * law.mean_y(a, l, u);
        }
        if (a == 1) pa[l * 2 + z] = mass;
        my[(l * 2 + z) * 2 + a] = mass > 0.0 ? num / mass : 0.0;
      }
    }
  }
  return ObservedLaw(law.schema(), true, law.p_l_vector(), law.p_z1_vector(), std::move(pa),
                     std::move(my));
}

ObservedLaw ObservedLaw::from_dataset(const Dataset& data) {
  if (data.kind() != RecordKind::observational) {
    throw ValidationError("observed law needs observational records");
  }
  const std::size_t nl = data.num_contexts(), n = data.size();
  std::vector<double> n_l(nl, 0.0), n_lz(2 * nl, 0.0), n_lza(4 * nl, 0.0), sum_y(4 * nl, 0.0);
  const auto ctx = data.context();
  const auto a = data.a();
  const auto y = data.y();
  const auto zc = data.z();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = ctx[i];
    const int z = data.has_instrument() ? zc[i] : 0;
    n_l[l] += 1.0;
    n_lz[l * 2 + z] += 1.0;
    n_lza[(l * 2 + z) * 2 + a[i]] += 1.0;
    sum_y[(l * 2 + z) * 2 + a[i]] += y[i];
  }
  std::vector<double> p_l(nl), f1(nl, 0.0), pa(2 * nl, 0.0), my(4 * nl, 0.0);
  for (std::size_t l = 0; l < nl; ++l) {
    p_l[l] = n_l[l] / static_cast<double>(n);
    if (n_l[l] > 0.0) f1[l] = n_lz[l * 2 + 1] / n_l[l];
    for (int z = 0; z < 2; ++z) {
      const double m = n_lz[l * 2 + z];
      if (m > 0.0) pa[l * 2 + z] = n_lza[(l * 2 + z) * 2 + 1] / m;
      for (int av = 0; av < 2; ++av) {
        const std::size_t k = (l * 2 + z) * 2 + av;
        if (n_lza[k] > 0.0) my[k] = sum_y[k] / n_lza[k];
      }
    }
  }
  // Rounding in the frequency sum can leave it a few ulps off 1.
  double s = 0.0;
  for (double p : p_l) s += p;
  for (double& p : p_l) p /= s;
  return ObservedLaw(data.schema(), data.has_instrument(), std::move(p_l), std::move(f1),
                     std::move(pa), std::move(my));
}

double ObservedLaw::p_a_given_l(int a, std::size_t l) const {
  return f(0, l) * p_a_given_zl(a, 0, l) + f(1, l) * p_a_given_zl(a, 1, l);
}

double ObservedLaw::mean_y_given_al(int a, std::size_t l) const {
  const double p = p_a_given_l(a, l);
  if (p <= 0.0) throw IdentificationError("P(A=" + std::to_string(a) + "|l) is zero at " + schema_.label(l));
  double num = 0.0;
  for (int z = 0; z < 2; ++z) num += f(z, l) * p_a_given_zl(a, z, l) * mean_y_given_azl(a, z, l);
  return num / p;
}

double ObservedLaw::mean_y_given_l(std::size_t l) const {
  double m = 0.0;
  for (int z = 0; z < 2; ++z) {
    for (int a = 0; a < 2; ++a) m += f(z, l) * p_a_given_zl(a, z, l) * mean_y_given_azl(a, z, l);
  }
  return m;
}

double ObservedLaw::mean_y() const {
  double m = 0.0;
  for (std::size_t l = 0; l < num_contexts(); ++l) {
    if (p_l_[l] > 0.0) m += p_l_[l] * mean_y_given_l(l);
  }
  return m;
}

double ObservedLaw::p_a(int a) const {
  double p = 0.0;
  for (std::size_t l = 0; l < num_contexts(); ++l) p += p_l_[l] * p_a_given_l(a, l);
  return p;
}

double ObservedLaw::delta(std::size_t l) const { return p_a1_[l * 2 + 1] - p_a1_[l * 2]; }

double ObservedLaw::signed_outcome_mean(int a, int z, std::size_t l) const {
  return (2 * a - 1) * p_a_given_zl(a, z, l) * mean_y_given_azl(a, z, l);
}

json ObservedLaw::to_json() const {
  json contexts = json::array();
  for (std::size_t l = 0; l < num_contexts(); ++l) {
    json cells = json::array();
    for (int z = 0; z < 2; ++z) {
      cells.push_back({{"z", z},
                       {"p_a1", p_a_given_zl(1, z, l)},
                       {"mean_y_a0", mean_y_given_azl(0, z, l)},
                       {"mean_y_a1", mean_y_given_azl(1, z, l)}});
    }
    contexts.push_back({{"context", schema_.label(l)},
                        {"p_l", p_l_[l]},
                        {"p_z1", f1_[l]},
                        {"delta", delta(l)},
                        {"by_z", cells}});
  }
  return {{"has_instrument", has_instrument_}, {"contexts", contexts}};
}

double psi1(const ObservedLaw& law, int a, std::size_t l) {
  if (!law.has_instrument()) throw ValidationError("psi1 requires an instrument");
  const double f1 = law.f(1, l);
  if (!(f1 > 0.0 && f1 < 1.0)) {
    throw IdentificationError("P(Z=1|l) must lie in (0,1) at " + law.schema().label(l));
  }
  const double d = law.delta(l);
  if (d == 0.0) throw IdentificationError("instrument is irrelevant (delta = 0) at " + law.schema().label(l));
  return (law.signed_outcome_mean(a, 1, l) - law.signed_outcome_mean(a, 0, l)) / d;
}

Psi1Table psi1_table(const ObservedLaw& law) {
  Psi1Table t(law.num_contexts());
  for (std::size_t l = 0; l < t.size(); ++l) {
    for (int a = 0; a < 2; ++a) t[l][a] = psi1(law, a, l);
  }
  return t;
}

double counterfactual_mean_given_natural(const ObservedLaw& law, const Psi1Table& psi, int a,
                                         int a_prime, std::size_t l) {
  const double p_nat = law.p_a_given_l(a_prime, l);
  if (p_nat <= 0.0) {
    throw IdentificationError("positivity fails: P(A=" + std::to_string(a_prime) + "|l) = 0 at " +
                              law.schema().label(l));
  }
  if (a == a_prime) return law.mean_y_given_al(a, l);
  const double p_a = law.p_a_given_l(a, l);
  const double factual = p_a > 0.0 ? law.mean_y_given_al(a, l) * p_a : 0.0;
  return (psi[l][a] - factual) / p_nat;
}

NaturalMeans natural_means(const ObservedLaw& law, const Psi1Table& psi) {
  NaturalMeans m(law.num_contexts());
  for (std::size_t l = 0; l < m.size(); ++l) {
    for (int ap = 0; ap < 2; ++ap) {
      for (int a = 0; a < 2; ++a) m[l][ap][a] = counterfactual_mean_given_natural(law, psi, a, ap, l);
    }
  }
  return m;
}

Regime superoptimal_rule(const ObservedLaw& law, const Psi1Table& psi) {
  std::vector<std::uint8_t> table(2 * law.num_contexts());
  for (std::size_t l = 0; l < law.num_contexts(); ++l) {
    const double ey = law.mean_y_given_l(l);
    for (int ap = 0; ap < 2; ++ap) {
      const bool keep = ey - psi[l][1 - ap] >= -kTieTolerance;
      table[l * 2 + ap] = static_cast<std::uint8_t>(keep ? ap : 1 - ap);
    }
  }
  return Regime::superoptimal(std::move(table));
}

Regime optimal_rule(const Psi1Table& psi) {
  std::vector<std::uint8_t> table(psi.size());
  for (std::size_t l = 0; l < psi.size(); ++l) {
    table[l] = static_cast<std::uint8_t>(argmax_binary(psi[l][0], psi[l][1], 1));
  }
  return Regime::optimal(std::move(table));
}

NaturalMeans lz_natural_means(const ObservedLaw& law, const Psi1Table& psi) {
  NaturalMeans m(2 * law.num_contexts());
  for (std::size_t l = 0; l < law.num_contexts(); ++l) {
    for (int z = 0; z < 2; ++z) {
      for (int ap = 0; ap < 2; ++ap) {
        const double p_nat = law.p_a_given_zl(ap, z, l);
        if (p_nat <= 0.0) {
          throw IdentificationError("positivity fails: P(A=" + std::to_string(ap) + "|l,z=" +
                                    std::to_string(z) + ") = 0 at " + law.schema().label(l));
        }
        for (int a = 0; a < 2; ++a) {
          m[l * 2 + z][ap][a] =
              a == ap ? law.mean_y_given_azl(a, z, l)
                      : (psi[l][a] - law.mean_y_given_azl(a, z, l) * law.p_a_given_zl(a, z, l)) / p_nat;
        }
      }
    }
  }
  return m;
}

Regime lz_superoptimal_rule(const ObservedLaw& law, const Psi1Table& psi) {
  const auto m = lz_natural_means(law, psi);
  std::vector<std::uint8_t> table(4 * law.num_contexts());
  for (std::size_t k = 0; k < m.size(); ++k) {
    for (int ap = 0; ap < 2; ++ap) {
      table[k * 2 + ap] = static_cast<std::uint8_t>(argmax_binary(m[k][ap][0], m[k][ap][1], ap));
    }
  }
  return Regime::superoptimal_z(std::move(table));
}

std::string_view to_string(Instruction instruction) {
  switch (instruction) {
    case Instruction::follow: return "follow";
    case Instruction::keep_intent: return "keep_intent";
    case Instruction::flip_intent: return "flip_intent";
  }
  return "?";
}

std::vector<int> gamma_map(const NaturalMeans& means) {
  std::vector<int> g(means.size());
  for (std::size_t l = 0; l < means.size(); ++l) {
    // A difference inside the tie band counts as nonnegative, matching the
    // keep-the-intent tie rule of the superoptimal regime.
    const bool t1 = means[l][1][1] - means[l][1][0] >= -kTieTolerance;
    const bool t0 = means[l][0][1] - means[l][0][0] >= -kTieTolerance;
    g[l] = t1 == t0 ? 0 : (t1 ? 1 : 2);
  }
  return g;
}

Regime reconstruct_superoptimal(const Regime& optimal, const std::vector<int>& gamma) {
  if (optimal.inputs() != RegimeInputs::context || optimal.num_contexts() != gamma.size()) {
    throw ValidationError("gamma map and optimal regime disagree on the context space");
  }
  std::vector<std::uint8_t> table(2 * gamma.size());
  for (std::size_t l = 0; l < gamma.size(); ++l) {
    for (int ap = 0; ap < 2; ++ap) {
      int v = 0;
      switch (gamma[l]) {
        case 0: v = optimal.assign(ap, l); break;
        case 1: v = ap; break;
        case 2: v = 1 - ap; break;
        default: throw ValidationError("gamma value outside {0,1,2}");
      }
      table[l * 2 + ap] = static_cast<std::uint8_t>(v);
    }
  }
  return Regime::superoptimal(std::move(table));
}

double preference_trial_mean(const Dataset& data, int a, int a_prime, std::size_t l) {
  if (data.kind() != RecordKind::trial) throw ValidationError("preference_trial_mean needs trial records");
  if (!data.has_natural()) {
    throw ValidationError("natural value unavailable: the trial did not record stated intent");
  }
  const auto ctx = data.context();
  const auto nat = data.a();
  const auto rec = data.a_star();
  const auto y = data.y();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (ctx[i] == l && nat[i] == a_prime && rec[i] == a) {
      sum += y[i];
      ++count;
    }
  }
  if (count == 0) {
    throw IdentificationError("no trial records with A*=" + std::to_string(a) + ", A=" +
                              std::to_string(a_prime) + " at " + data.schema().label(l));
  }
  return sum / static_cast<double>(count);
}

}  // namespace superopt
