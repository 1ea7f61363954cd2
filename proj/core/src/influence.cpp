#include "superopt/influence.hpp"

#include <cmath>

#include "superopt/types.hpp"

namespace superopt {

double eif_psi1(const Observation& row, const NuisanceTables& t, int a, std::size_t l) {
  if (row.context != l) return 0.0;
  if (!row.z) throw ValidationError("the influence function of psi1 needs the instrument");
  const int z = *row.z;
  const double s = 2.0 * z - 1.0;
  const double pl = t.p_l[l];
  const double d = t.delta[l];
  const double fz = t.f(z, l);
  const double r = (2.0 * row.a - 1.0) * row.y * (row.a == a ? 1.0 : 0.0);
  const double k = 1.0 / (d * fz * pl);
  const double m_diff = t.m(a, 1, l) - t.m(a, 0, l);
  const double a_tilde = 2.0 * row.a - 1.0;
  const double a_tilde_mean = 2.0 * t.p_a_zl(1, z, l) - 1.0;

  const double lead = s * r * k;
  const double own_cell = s * t.m(a, z, l) * k;
  const double cross = m_diff / (d * pl);
  const double compliance = s * (a_tilde - a_tilde_mean) / (2.0 * fz * d * pl) * (m_diff / d);
  // E[lead | L=l] = ψ₁/P(l), which `cross` also equals; both are kept so
  // each term of the displayed formula has its own line.
  const double centring = t.psi1[l][a] / pl;
  return lead - (own_cell - cross + compliance) - centring;
}

double plugin_Psi(const NuisanceTables& t, int a, std::size_t l) {
  return (t.psi1[l][a] - t.mean_al(a, l) * t.p_a_l(a, l)) / t.p_a_l(1 - a, l);
}

double eif_Psi(const Observation& row, const NuisanceTables& t, int a, std::size_t l) {
  if (row.context != l) return 0.0;
  const double pl = t.p_l[l];
  const double p_other = t.p_a_l(1 - a, l);
  const double p_own = t.p_a_l(a, l);
  const double mu = t.mean_al(a, l);
  const double psi = t.psi1[l][a];
  const double i_own = row.a == a ? 1.0 : 0.0;
  const double i_other = 1.0 - i_own;

  const double d_psi = eif_psi1(row, t, a, l);
  const double d_p_other = (i_other - p_other) / pl;
  const double d_mu = i_own / (p_own * pl) * (row.y - mu);
  const double d_p_own = (i_own - p_own) / pl;
  const double num = d_psi * p_other - psi * d_p_other - (d_mu * p_own + mu * d_p_own) * p_other +
                     mu * p_own * d_p_other;
  return num / (p_other * p_other);
}

double eif_value(const Observation& row, const Regime& regime, const NuisanceTables& t) {
  if (regime.uses_instrument()) {
    throw ValidationError("the value influence function covers regimes keyed on (A, L) only");
  }
  double out = 0.0;
  for (std::size_t l = 0; l < t.num_contexts; ++l) {
    for (int a = 0; a < 2; ++a) {
      const double p_cell = t.p_a_l(a, l) * t.p_l[l];
      const double in_cell = row.context == l && row.a == a ? 1.0 : 0.0;
      const int g = regime.assign(a, l);
      double mu_g;
      if (g == a) {
        mu_g = t.mean_al(a, l);
        out += in_cell * (row.y - mu_g);
      } else {
        mu_g = plugin_Psi(t, 1 - a, l);
        out += eif_Psi(row, t, 1 - a, l) * p_cell;
      }
      out += mu_g * (in_cell - p_cell);
    }
  }
  return out;
}

double one_step_Psi(const Dataset& sample, const NuisanceTables& t, int a, std::size_t l) {
  const auto m = influence_mean(sample, [&](const Observation& o) { return eif_Psi(o, t, a, l); });
  return plugin_Psi(t, a, l) + m.mean;
}

double one_step_contrast(const Dataset& sample, const NuisanceTables& t, int a, std::size_t l) {
  if (!(t.p_l[l] > 0.0)) throw IdentificationError("empty covariate stratum " + sample.schema().label(l));
  const auto m = influence_mean(sample, [&](const Observation& o) {
    const double own = o.context == l ? (o.y - t.mean_y_l[l]) / t.p_l[l] : 0.0;
    return own - eif_psi1(o, t, a, l);
  });
  return t.mean_y_l[l] - t.psi1[l][a] + m.mean;
}

}  // namespace superopt
