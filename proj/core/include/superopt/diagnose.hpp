#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "superopt/config.hpp"
#include "superopt/dataset.hpp"
#include "superopt/identify.hpp"
#include "superopt/regime.hpp"
#include "superopt/types.hpp"

namespace superopt {

/// Coarsenings B of the natural treatment (identity or constant) and C of
/// the covariate context.
struct Coarsening {
  bool split_by_treatment = false;      // B identity when true
  std::vector<std::size_t> context_map;  // l → c
  std::vector<std::string> labels;       // c → label

  std::size_t num_strata() const { return labels.size(); }

  /// One stratum holding every context.
  static Coarsening trivial(const CovariateSchema& schema, bool split_by_treatment = false);
  /// One stratum per context.
  static Coarsening identity(const CovariateSchema& schema, bool split_by_treatment = false);
  /// One stratum per level of the named covariate.
  static Coarsening by_covariate(const CovariateSchema& schema, const std::string& name,
                                 bool split_by_treatment = false);
};

/// A cell of the coarsened space; b = -1 when B is constant.
struct Stratum {
  int b = -1;
  std::size_t c = 0;
};

std::vector<Stratum> strata(const Coarsening& coarsening);

/// Interval of E(Y^g | B=b, C=c) over regimes g that depend on L only,
/// assuming Y^a ⫫ A | L:
///   [Σ_l min_a ψ₁(a,l) w_l, Σ_l max_a ψ₁(a,l) w_l],  w_l = P(L=l | B=b, C=c).
/// With B constant the weights are P(L=l | C=c). `cell_mass` holds
/// P(A=a, L=l) at [l*2+a]. Throws IdentificationError on an empty stratum.
std::vector<IntervalBound> confounding_intervals(const Psi1Table& psi, const std::vector<double>& cell_mass,
                                                 const Coarsening& coarsening);

enum class Verdict { contained, violated };
std::string_view to_string(Verdict v);

/// Containment of a population quantity, up to `tol`.
Verdict check_containment(const IntervalBound& interval, double value, double tol = 1e-10);

/// Conservative verdict: violated only when the interval of the tested
/// quantity lies entirely below the lower end of the CI of the lower
/// endpoint or entirely above the upper end of the CI of the upper endpoint.
Verdict check_containment_ci(const IntervalBound& lower_endpoint_ci, const IntervalBound& upper_endpoint_ci,
                             const IntervalBound& tested_ci);

struct StratumReport {
  Stratum stratum;
  std::string label;
  IntervalBound interval;
  double mean_y = 0.0;
  double value_sup = 0.0;
  std::optional<IntervalBound> lower_ci, upper_ci, mean_y_ci, value_sup_ci;
  Verdict mean_verdict = Verdict::contained;
  Verdict value_verdict = Verdict::contained;
};

struct DiagnosticReport {
  std::vector<StratumReport> strata;
  std::vector<std::string> warnings;

  bool any_violation() const;
};

/// Exact check on a known law: intervals from ψ₁, tested quantities
/// E(Y | b, c) and E(Y^{g_sup} | b, c) from the identified superoptimal
/// regime.
DiagnosticReport diagnose_law(const ObservedLaw& law, const Coarsening& coarsening, double tol = 1e-10);

/// Sample version: plug-in nuisances on `data`, the supplied superoptimal
/// regime held fixed, percentile bootstrap intervals for all four
/// quantities and the conservative verdict.
DiagnosticReport diagnose_sample(const Dataset& data, const Regime& g_sup, const Coarsening& coarsening,
                                 const EstimationConfig& cfg);

nlohmann::json to_json(const DiagnosticReport& report);
std::string format_diagnostic_table(const DiagnosticReport& report);

}  // namespace superopt
