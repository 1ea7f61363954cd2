#include "superopt/nuisance.hpp"

#include <cmath>
#include <functional>

#include "superopt/types.hpp"

namespace superopt {

using nlohmann::json;

void NuisanceTables::refresh_psi1() {
  psi1.assign(num_contexts, {0.0, 0.0});
  for (std::size_t l = 0; l < num_contexts; ++l) {
    for (int a = 0; a < 2; ++a) psi1[l][a] = (m(a, 1, l) - m(a, 0, l)) / delta[l];
  }
}

NuisanceTables nuisance_tables(const ObservedLaw& law) {
  NuisanceTables t;
  const std::size_t nl = law.num_contexts();
  t.num_contexts = nl;
  t.p_l.resize(nl);
  t.f1.resize(nl);
  t.p_a1_zl.resize(2 * nl);
  t.signed_mean.resize(4 * nl);
  t.mean_y_azl.resize(4 * nl);
  t.mean_y_l.resize(nl);
  t.mean_y_al.resize(2 * nl);
  t.p_a1_l.resize(nl);
  t.delta.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    t.p_l[l] = law.p_l(l);
    t.f1[l] = law.f(1, l);
    t.mean_y_l[l] = law.mean_y_given_l(l);
    t.p_a1_l[l] = law.p_a_given_l(1, l);
    t.delta[l] = law.delta(l);
    for (int a = 0; a < 2; ++a) {
      t.mean_y_al[l * 2 + a] = law.p_a_given_l(a, l) > 0.0 ? law.mean_y_given_al(a, l) : 0.0;
    }
    for (int z = 0; z < 2; ++z) {
      t.p_a1_zl[l * 2 + z] = law.p_a_given_zl(1, z, l);
      for (int a = 0; a < 2; ++a) {
        t.signed_mean[(l * 2 + z) * 2 + a] = law.signed_outcome_mean(a, z, l);
        t.mean_y_azl[(l * 2 + z) * 2 + a] = law.mean_y_given_azl(a, z, l);
      }
    }
  }
  t.psi1 = psi1_table(law);
  return t;
}

json to_json(const NuisanceFit& fit) {
  return {{"model", fit.model_id},
          {"family", fit.family == Family::binomial ? "binomial" : "gaussian"},
          {"design", std::string(to_string(fit.design))},
          {"basis", fit.basis},
          {"coefficients", fit.coefficients},
          {"converged", fit.converged},
          {"separated", fit.separated},
          {"deviance", fit.deviance},
          {"iterations", fit.iterations},
          {"rows", fit.rows}};
}

namespace {

// Every response used here is c0 + c1*Y on the rows a selector admits,
// with c0, c1 depending on (z, a) only.
struct ModelSpec {
  std::string id;
  std::function<bool(int z, int a)> select;
  std::function<double(int z, int a)> c0;
  std::function<double(int z, int a)> c1;
};

struct CellStats {
  double n = 0.0;
  double sy = 0.0;
  double syy = 0.0;
};

struct ModelResult {
  std::vector<double> by_context;
  NuisanceFit fit;
};

class Fitter {
 public:
  Fitter(const Dataset& data, const EstimationConfig& cfg, bool record)
      : data_(data), cfg_(cfg), record_(record), nl_(data.num_contexts()), cells_(4 * nl_) {
    const auto ctx = data.context();
    const auto z = data.z();
    const auto a = data.a();
    const auto y = data.y();
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto& c = cells_[(ctx[i] * 2 + z[i]) * 2 + a[i]];
      c.n += 1.0;
      c.sy += y[i];
      c.syy += y[i] * y[i];
    }
  }

  const CellStats& cell(std::size_t l, int z, int a) const { return cells_[(l * 2 + z) * 2 + a]; }

  ModelResult fit(const ModelSpec& spec) const {
    bool binary = data_.outcome_binary();
    if (!binary) {
      binary = true;
      for (int z = 0; z < 2; ++z) {
        for (int a = 0; a < 2; ++a) {
          if (spec.select(z, a) && spec.c1(z, a) != 0.0) binary = false;
        }
      }
    }
    const Family family = binary ? Family::binomial : Family::gaussian;
    return cfg_.design == Design::saturated ? saturated(spec, family) : main_effects(spec, family);
  }

 private:
  ModelResult saturated(const ModelSpec& spec, Family family) const {
    std::vector<double> n(nl_, 0.0), s(nl_, 0.0), ss(nl_, 0.0);
    double n_all = 0.0, s_all = 0.0;
    for (std::size_t l = 0; l < nl_; ++l) {
      for (int z = 0; z < 2; ++z) {
        for (int a = 0; a < 2; ++a) {
          if (!spec.select(z, a)) continue;
          const auto& c = cell(l, z, a);
          const double c0 = spec.c0(z, a), c1 = spec.c1(z, a);
          n[l] += c.n;
          s[l] += c0 * c.n + c1 * c.sy;
          ss[l] += c0 * c0 * c.n + 2.0 * c0 * c1 * c.sy + c1 * c1 * c.syy;
        }
      }
      n_all += n[l];
      s_all += s[l];
    }
    if (n_all == 0.0) throw IdentificationError("no rows available to fit " + spec.id);
    ModelResult r;
    r.by_context.resize(nl_);
    const double pooled = s_all / n_all;
    for (std::size_t l = 0; l < nl_; ++l) r.by_context[l] = n[l] > 0.0 ? s[l] / n[l] : pooled;
    if (record_) {
      r.fit.model_id = spec.id;
      r.fit.family = family;
      r.fit.design = Design::saturated;
      r.fit.basis = design_names(data_.schema(), Design::saturated);
      r.fit.coefficients = r.by_context;
      r.fit.rows = static_cast<std::size_t>(n_all);
      r.fit.iterations = 0;
      double dev = 0.0;
      for (std::size_t l = 0; l < nl_; ++l) {
        const double p = r.by_context[l];
        if (family == Family::gaussian) {
          dev += ss[l] - 2.0 * p * s[l] + n[l] * p * p;
        } else {
          // s[l] counts the ones among binary responses.
          if (s[l] > 0.0) dev -= 2.0 * s[l] * std::log(p);
          if (n[l] - s[l] > 0.0) dev -= 2.0 * (n[l] - s[l]) * std::log(1.0 - p);
        }
      }
      r.fit.deviance = dev;
    }
    return r;
  }

  ModelResult main_effects(const ModelSpec& spec, Family family) const {
    const auto ctx = data_.context();
    const auto z = data_.z();
    const auto a = data_.a();
    const auto y = data_.y();
    std::vector<std::uint32_t> rows_ctx;
    std::vector<double> resp;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!spec.select(z[i], a[i])) continue;
      rows_ctx.push_back(ctx[i]);
      resp.push_back(spec.c0(z[i], a[i]) + spec.c1(z[i], a[i]) * y[i]);
    }
    if (resp.empty()) throw IdentificationError("no rows available to fit " + spec.id);
    const DesignMatrix x = design_matrix(data_.schema(), rows_ctx, Design::main_effects);
    GlmOptions opts;
    opts.tol = cfg_.irls_tol;
    opts.max_iter = cfg_.irls_max_iter;
    const GlmFit g = fit_glm(x, resp, family, opts);
    ModelResult r;
    r.by_context.resize(nl_);
    for (std::size_t l = 0; l < nl_; ++l) {
      r.by_context[l] = g.predict(design_row(data_.schema(), l, Design::main_effects));
    }
    r.fit.model_id = spec.id;
    r.fit.family = family;
    r.fit.design = Design::main_effects;
    r.fit.basis = x.names;
    r.fit.coefficients = g.coefficients;
    r.fit.converged = g.converged;
    r.fit.separated = g.separated;
    r.fit.deviance = g.deviance;
    r.fit.iterations = g.iterations;
    r.fit.rows = resp.size();
    return r;
  }

  const Dataset& data_;
  const EstimationConfig& cfg_;
  bool record_;
  std::size_t nl_;
  std::vector<CellStats> cells_;
};

std::string tag(const std::string& base, const std::string& args) { return base + "(" + args + ")"; }

}  // namespace

NuisanceSet fit_nuisances(const Dataset& data, const EstimationConfig& cfg, bool record_fits) {
  if (data.kind() != RecordKind::observational) {
    throw ValidationError("nuisance fitting needs observational records");
  }
  data.require_instrument("nuisance fitting");
  cfg.validate();
  const std::size_t nl = data.num_contexts();
  const Fitter fitter(data, cfg, record_fits || cfg.design == Design::main_effects);

  NuisanceSet out;
  auto& t = out.tables;
  t.num_contexts = nl;
  t.p_a1_zl.resize(2 * nl);
  t.signed_mean.resize(4 * nl);
  t.mean_y_azl.resize(4 * nl);
  t.mean_y_al.resize(2 * nl);

  auto run = [&](const ModelSpec& spec) {
    ModelResult r = fitter.fit(spec);
    if (cfg.design == Design::main_effects) {
      if (!r.fit.converged) out.warnings.push_back(spec.id + ": IRLS did not converge");
      if (r.fit.separated) out.warnings.push_back(spec.id + ": separation detected");
    }
    if (record_fits) out.fits.push_back(std::move(r.fit));
    return std::move(r.by_context);
  };
  auto zero = [](int, int) { return 0.0; };
  auto one = [](int, int) { return 1.0; };
  auto all = [](int, int) { return true; };

  t.f1 = run({"z_given_l", all, [](int z, int) { return double(z); }, zero});
  for (int z = 0; z < 2; ++z) {
    auto pa = run({tag("a_given_zl", "z=" + std::to_string(z)), [z](int zz, int) { return zz == z; },
                   [](int, int a) { return double(a); }, zero});
    for (std::size_t l = 0; l < nl; ++l) t.p_a1_zl[l * 2 + z] = pa[l];
  }
  for (int a = 0; a < 2; ++a) {
    for (int z = 0; z < 2; ++z) {
      // Fitted on Y I(A=a); the sign (2a−1) is applied afterwards, which is
      // the same fit as the −Y I(A=0) + 1 response for a = 0.
      auto m = run({tag("y2a1_given_lz", "a=" + std::to_string(a) + ",z=" + std::to_string(z)),
                    [z](int zz, int) { return zz == z; }, zero,
                    [a](int, int aa) { return aa == a ? 1.0 : 0.0; }});
      for (std::size_t l = 0; l < nl; ++l) t.signed_mean[(l * 2 + z) * 2 + a] = (2 * a - 1) * m[l];
    }
  }
  t.mean_y_l = run({"y_given_l", all, zero, one});
  for (int a = 0; a < 2; ++a) {
    auto my = run({tag("y_given_al", "a=" + std::to_string(a)), [a](int, int aa) { return aa == a; },
                   zero, one});
    for (std::size_t l = 0; l < nl; ++l) t.mean_y_al[l * 2 + a] = my[l];
  }
  t.p_a1_l = run({"a_given_l", all, [](int, int a) { return double(a); }, zero});
  for (int a = 0; a < 2; ++a) {
    for (int z = 0; z < 2; ++z) {
      // A cell no row reaches carries zero mass wherever E(Y|a,z,l) enters.
      std::size_t rows = 0;
      for (std::size_t l = 0; l < nl; ++l) rows += fitter.cell(l, z, a).n;
      if (rows == 0) continue;
      auto my = run({tag("y_given_alz", "a=" + std::to_string(a) + ",z=" + std::to_string(z)),
                     [a, z](int zz, int aa) { return aa == a && zz == z; }, zero, one});
      for (std::size_t l = 0; l < nl; ++l) t.mean_y_azl[(l * 2 + z) * 2 + a] = my[l];
    }
  }

  const double n = static_cast<double>(data.size());
  t.p_l.assign(nl, 0.0);
  for (auto l : data.context()) t.p_l[l] += 1.0;
  for (auto& p : t.p_l) p /= n;

  out.delta_floored.assign(nl, 0);
  out.empty_cells.assign(nl, 0);
  t.delta.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) {
    double d = t.p_a1_zl[l * 2 + 1] - t.p_a1_zl[l * 2];
    if (std::abs(d) < cfg.delta_floor) {
      d = d < 0.0 ? -cfg.delta_floor : cfg.delta_floor;
      out.delta_floored[l] = 1;
      out.warnings.push_back("instrument strength floored at " + data.schema().label(l));
    }
    t.delta[l] = d;
    std::size_t smallest = SIZE_MAX;
    for (int z = 0; z < 2; ++z) {
      for (int a = 0; a < 2; ++a) {
        smallest = std::min(smallest, static_cast<std::size_t>(fitter.cell(l, z, a).n));
      }
    }
    if (smallest == 0) out.empty_cells[l] = 1;
    if (smallest < kLowCellCount) {
      out.warnings.push_back("low-count cell (" + std::to_string(smallest) + " rows) at " +
                             data.schema().label(l));
    }
  }
  t.refresh_psi1();
  return out;
}

}  // namespace superopt
