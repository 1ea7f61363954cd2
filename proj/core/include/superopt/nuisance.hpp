#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "superopt/config.hpp"
#include "superopt/dataset.hpp"
#include "superopt/glm.hpp"
#include "superopt/identify.hpp"

namespace superopt {

/// Nuisance functions evaluated at every context. Filled either from fitted
/// regressions or from a known observed law; the estimators and influence
/// functions read only this table, so tests can swap in true or deliberately
/// wrong entries.
struct NuisanceTables {
  std::size_t num_contexts = 0;
  std::vector<double> p_l;          // [l]
  std::vector<double> f1;           // [l] P(Z=1|l)
  std::vector<double> p_a1_zl;      // [l*2+z]
  std::vector<double> signed_mean;  // [(l*2+z)*2+a] E((2A−1) Y I(A=a) | z, l)
  std::vector<double> mean_y_azl;   // [(l*2+z)*2+a]
  std::vector<double> mean_y_l;     // [l]
  std::vector<double> mean_y_al;    // [l*2+a]
  std::vector<double> p_a1_l;       // [l]
  std::vector<double> delta;        // [l], after flooring
  Psi1Table psi1;                   // [l][a]

  double f(int z, std::size_t l) const { return z ? f1[l] : 1.0 - f1[l]; }
  double p_a_zl(int a, int z, std::size_t l) const {
    return a ? p_a1_zl[l * 2 + z] : 1.0 - p_a1_zl[l * 2 + z];
  }
  double m(int a, int z, std::size_t l) const { return signed_mean[(l * 2 + z) * 2 + a]; }
  double mean_azl(int a, int z, std::size_t l) const { return mean_y_azl[(l * 2 + z) * 2 + a]; }
  double mean_al(int a, std::size_t l) const { return mean_y_al[l * 2 + a]; }
  double p_a_l(int a, std::size_t l) const { return a ? p_a1_l[l] : 1.0 - p_a1_l[l]; }

  /// Recomputes ψ₁ from signed_mean and delta.
  void refresh_psi1();
};

/// Exact nuisance values of a known law, δ left unfloored.
NuisanceTables nuisance_tables(const ObservedLaw& law);

/// Summary of one fitted regression. Saturated fits are computed in closed
/// form as cell means, which is the maximum likelihood solution; their
/// coefficients are the fitted means on the response scale.
struct NuisanceFit {
  std::string model_id;
  Family family = Family::binomial;
  Design design = Design::saturated;
  std::vector<std::string> basis;
  std::vector<double> coefficients;
  bool converged = true;
  bool separated = false;
  double deviance = 0.0;
  int iterations = 0;
  std::size_t rows = 0;
};

nlohmann::json to_json(const NuisanceFit& fit);

struct NuisanceSet {
  NuisanceTables tables;
  std::vector<NuisanceFit> fits;             // empty unless requested
  std::vector<std::uint8_t> delta_floored;   // [l]
  std::vector<std::uint8_t> empty_cells;     // [l] some (z,a) cell had no rows
  std::vector<std::string> warnings;
};

/// Rows with fewer than this many observations in some (l,z,a) cell are
/// reported as low-count.
inline constexpr std::size_t kLowCellCount = 5;

/// Fits every nuisance regression on `data`: P(Z=1|L), P(A=1|Z=z,L),
/// E(Y I(A=a)|Z=z,L), E(Y|L), E(Y|A=a,L), E(Y|A=a,Z=z,L) and P(A=1|L).
/// Responses with values outside {0,1} use the gaussian family.
NuisanceSet fit_nuisances(const Dataset& data, const EstimationConfig& cfg, bool record_fits = false);

}  // namespace superopt
