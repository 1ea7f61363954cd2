#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <optional>
#include <vector>

#include "superopt/dataset.hpp"

namespace superopt {

/// Basis over the categorical covariates. `saturated` is one indicator per
/// context; `main_effects` is an intercept plus one indicator per
/// non-reference level of each covariate.
enum class Design { saturated, main_effects };

std::string_view to_string(Design design);
std::optional<Design> parse_design(std::string_view text);

/// Dense row-major model matrix.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> names;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

std::vector<std::string> design_names(const CovariateSchema& schema, Design design);
std::vector<double> design_row(const CovariateSchema& schema, std::size_t context, Design design);
DesignMatrix design_matrix(const CovariateSchema& schema, std::span<const std::uint32_t> contexts,
                           Design design);

enum class Family { binomial, gaussian };

struct GlmOptions {
  double tol = 1e-8;
  int max_iter = 100;
  /// A coefficient larger than this in magnitude signals separation.
  double separation_threshold = 30.0;
};

struct GlmFit {
  Family family = Family::binomial;
  std::vector<double> coefficients;
  bool converged = false;
  bool separated = false;
  double deviance = 0.0;
  int iterations = 0;

  /// Fitted mean at design row `x`.
  double predict(std::span<const double> x) const;
};

/// Maximum likelihood by iteratively reweighted least squares with
/// step-halving whenever the deviance increases. Binomial responses may be
/// fractional in [0,1]; the gaussian family is solved in one step. A
/// rank-deficient design gets the minimum-norm solution.
GlmFit fit_glm(const DesignMatrix& x, std::span<const double> y, Family family,
               const GlmOptions& options = {});

inline GlmFit fit_logit(const DesignMatrix& x, std::span<const double> y,
                        const GlmOptions& options = {}) {
  return fit_glm(x, y, Family::binomial, options);
}

double binomial_deviance(std::span<const double> y, std::span<const double> mu);

}  // namespace superopt
