#include "superopt/glm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "superopt/types.hpp"

namespace superopt {

std::string_view to_string(Design design) {
  return design == Design::saturated ? "saturated" : "main_effects";
}

std::optional<Design> parse_design(std::string_view text) {
  if (text == "saturated") return Design::saturated;
  if (text == "main_effects") return Design::main_effects;
  return std::nullopt;
}

std::vector<std::string> design_names(const CovariateSchema& schema, Design design) {
  std::vector<std::string> names;
  if (design == Design::saturated) {
    for (std::size_t l = 0; l < schema.num_contexts(); ++l) names.push_back(schema.label(l));
    return names;
  }
  names.emplace_back("(intercept)");
  for (const auto& c : schema.covariates()) {
    for (std::size_t k = 1; k < c.levels.size(); ++k) names.push_back(c.name + "=" + c.levels[k]);
  }
  return names;
}

std::vector<double> design_row(const CovariateSchema& schema, std::size_t context, Design design) {
  if (design == Design::saturated) {
    std::vector<double> x(schema.num_contexts(), 0.0);
    x[context] = 1.0;
    return x;
  }
  std::vector<double> x{1.0};
  const auto levels = schema.decode(context);
  for (std::size_t j = 0; j < levels.size(); ++j) {
    for (std::size_t k = 1; k < schema.covariates()[j].levels.size(); ++k) {
      x.push_back(levels[j] == k ? 1.0 : 0.0);
    }
  }
  return x;
}

DesignMatrix design_matrix(const CovariateSchema& schema, std::span<const std::uint32_t> contexts,
                           Design design) {
  DesignMatrix m;
  m.names = design_names(schema, design);
  m.cols = m.names.size();
  m.rows = contexts.size();
  // Rows repeat per context, so build each distinct row once.
  std::vector<std::vector<double>> cache(schema.num_contexts());
  m.values.reserve(m.rows * m.cols);
  for (auto l : contexts) {
    if (cache[l].empty()) cache[l] = design_row(schema, l, design);
    m.values.insert(m.values.end(), cache[l].begin(), cache[l].end());
  }
  return m;
}

double GlmFit::predict(std::span<const double> x) const {
  double eta = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) eta += x[j] * coefficients[j];
  if (family == Family::gaussian) return eta;
  return 1.0 / (1.0 + std::exp(-eta));
}

double binomial_deviance(std::span<const double> y, std::span<const double> mu) {
  auto xlogx = [](double a, double b) { return a > 0.0 ? a * std::log(a / b) : 0.0; };
  double d = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double m = std::clamp(mu[i], 1e-300, 1.0 - 1e-16);
    d += xlogx(y[i], m) + xlogx(1.0 - y[i], 1.0 - m);
  }
  return 2.0 * d;
}

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::VectorXd solve_weighted(const Eigen::Map<const Matrix>& x, const Eigen::VectorXd& w,
                               const Eigen::VectorXd& z) {
  const Eigen::VectorXd sw = w.array().sqrt();
  const Matrix xw = sw.asDiagonal() * x;
  const Eigen::VectorXd zw = sw.cwiseProduct(z);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xw);
  return cod.solve(zw);
}

}  // namespace

GlmFit fit_glm(const DesignMatrix& xm, std::span<const double> y, Family family,
               const GlmOptions& options) {
  if (xm.rows != y.size()) throw ValidationError("design and response lengths differ");
  if (xm.rows == 0) throw ValidationError("cannot fit a regression on zero rows");
  for (double v : y) {
    if (!std::isfinite(v)) throw ValidationError("regression response must be finite");
    if (family == Family::binomial && (v < 0.0 || v > 1.0)) {
      throw ValidationError("binomial response outside [0,1]");
    }
  }
  const Eigen::Map<const Matrix> x(xm.values.data(), static_cast<Eigen::Index>(xm.rows),
                                   static_cast<Eigen::Index>(xm.cols));
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));

  GlmFit fit;
  fit.family = family;
  if (family == Family::gaussian) {
    const Eigen::VectorXd beta = solve_weighted(x, Eigen::VectorXd::Ones(yv.size()), yv);
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());
    fit.deviance = (yv - x * beta).squaredNorm();
    fit.converged = true;
    fit.iterations = 1;
    return fit;
  }

  auto deviance_at = [&](const Eigen::VectorXd& beta) {
    const Eigen::VectorXd mu = (1.0 + (-(x * beta).array()).exp()).inverse().matrix();
    return binomial_deviance(y, std::span<const double>(mu.data(), mu.size()));
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  double dev = deviance_at(beta);
  for (int it = 1; it <= options.max_iter; ++it) {
    fit.iterations = it;
    const Eigen::VectorXd eta = x * beta;
    const Eigen::VectorXd mu = (1.0 + (-eta.array()).exp()).inverse().matrix();
    const Eigen::VectorXd w = (mu.array() * (1.0 - mu.array())).max(1e-10).matrix();
    const Eigen::VectorXd z = eta + ((yv - mu).array() / w.array()).matrix();
    Eigen::VectorXd next = solve_weighted(x, w, z);
    double dev_next = deviance_at(next);
    for (int half = 0; half < 30 && !(dev_next <= dev + 1e-12 * (1.0 + std::abs(dev))); ++half) {
      next = 0.5 * (beta + next);
      dev_next = deviance_at(next);
    }
    const bool done = std::abs(dev - dev_next) / (std::abs(dev_next) + 0.1) < options.tol;
    beta = next;
    dev = dev_next;
    if (done) {
      fit.converged = true;
      break;
    }
  }
  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  fit.deviance = dev;
  // Divergent coefficients, or fitted probabilities pinned at 0 or 1.
  const Eigen::ArrayXd mu = (1.0 + (-(x * beta).array()).exp()).inverse();
  fit.separated = std::any_of(fit.coefficients.begin(), fit.coefficients.end(),
                              [&](double b) { return std::abs(b) > options.separation_threshold; }) ||
                  (mu < 1e-8).any() || (mu > 1.0 - 1e-8).any();
  return fit;
}

}  // namespace superopt
