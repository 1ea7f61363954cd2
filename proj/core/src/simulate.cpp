#include "superopt/simulate.hpp"

#include <cmath>
#include <numeric>

#include "superopt/types.hpp"

namespace superopt {
namespace {

void check_pmf(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw ValidationError(std::string(what) + " is empty");
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " has an entry outside [0,1]");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ValidationError(std::string(what) + " does not sum to 1");
}

void check_probabilities(const std::vector<double>& p, const char* what) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " has an entry outside [0,1]");
  }
}

}  // namespace

StructuralLaw::StructuralLaw(CovariateSchema schema, std::vector<double> p_u,
                             std::vector<double> p_l, std::vector<double> p_z1_given_l,
                             std::vector<double> p_a1_given_zlu, std::vector<double> mean_y,
                             OutcomeNoise noise)
    : schema_(std::move(schema)),
      p_u_(std::move(p_u)),
      p_l_(std::move(p_l)),
      p_z1_(std::move(p_z1_given_l)),
      p_a1_(std::move(p_a1_given_zlu)),
      mean_y_(std::move(mean_y)),
      noise_(noise) {
  check_pmf(p_u_, "p_u");
  check_pmf(p_l_, "p_l");
  if (p_l_.size() != schema_.num_contexts()) {
    throw ValidationError("p_l must have one entry per covariate context");
  }
  const std::size_t nl = p_l_.size(), nu = p_u_.size();
  if (p_z1_.size() != nl) throw ValidationError("p_z1_given_l must have one entry per context");
  check_probabilities(p_z1_, "p_z1_given_l");
  if (p_a1_.size() != nl * 2 * nu) throw ValidationError("p_a1_given_zlu has the wrong size");
  check_probabilities(p_a1_, "p_a1_given_zlu");
  if (mean_y_.size() != 2 * nl * nu) throw ValidationError("mean_y_given_alu has the wrong size");
  for (double m : mean_y_) {
    if (!std::isfinite(m)) throw ValidationError("mean_y_given_alu must be finite");
    if (noise_.kind == OutcomeNoise::Kind::bernoulli && (m < 0.0 || m > 1.0)) {
      throw ValidationError("bernoulli outcome noise requires means in [0,1]");
    }
  }
  if (noise_.kind == OutcomeNoise::Kind::gaussian && !(noise_.sigma > 0.0)) {
    throw ValidationError("gaussian outcome noise requires sigma > 0");
  }
}

std::optional<ExampleId> parse_example_id(std::string_view text) {
  if (text == "ex1") return ExampleId::ex1;
  if (text == "ex2") return ExampleId::ex2;
  if (text == "ex3") return ExampleId::ex3;
  return std::nullopt;
}

StructuralLaw build_example_law(ExampleId id, const ExampleParams& params) {
  const std::vector<double> half{0.5, 0.5};
  if (id == ExampleId::ex3) {
    const double c = params.c;
    if (!(c > 0.0 && c < 0.4)) throw ValidationError("ex3 requires 0 < c < 0.4");
    std::vector<double> pa(4);
    for (int z = 0; z < 2; ++z) {
      for (int u = 0; u < 2; ++u) pa[z * 2 + u] = 0.5 * c + c * z + c * u;
    }
    // E(Y^0 | U=0,1) = 0.1, 0.7 and E(Y^1 | U=0,1) = 0.9, 0.1.
    std::vector<double> my{0.1, 0.7, 0.9, 0.1};
    return StructuralLaw(CovariateSchema{}, half, {1.0}, {0.5}, pa, my,
                         {OutcomeNoise::Kind::bernoulli, 0.0});
  }

  // Examples 1 and 2: A^{z} ~ Bernoulli(0.3U + 0.4 + 0.2z), flipped in ex2;
  // Y^0 ~ N(1 - 2U, 1), Y^1 ~ N(2U - 1, 1).
  CovariateSchema schema;
  std::vector<double> p_l{1.0};
  if (params.with_w) {
    schema = CovariateSchema({{"w", {"0", "1"}}});
    p_l = half;
  }
  const std::size_t nl = p_l.size();
  std::vector<double> pa(nl * 4), my(2 * nl * 2);
  for (std::size_t l = 0; l < nl; ++l) {
    for (int z = 0; z < 2; ++z) {
      for (int u = 0; u < 2; ++u) {
        const double p = 0.3 * u + 0.4 + 0.2 * z;
        pa[(l * 2 + z) * 2 + u] = id == ExampleId::ex1 ? p : 1.0 - p;
      }
    }
    for (int u = 0; u < 2; ++u) {
      my[(0 * nl + l) * 2 + u] = 1.0 - 2.0 * u;
      my[(1 * nl + l) * 2 + u] = 2.0 * u - 1.0;
    }
  }
  return StructuralLaw(std::move(schema), half, p_l, std::vector<double>(nl, 0.5), pa, my,
                       {OutcomeNoise::Kind::gaussian, 1.0});
}

namespace {

// Visits every (l, u, z, a') cell compatible with the condition with its
// joint probability.
template <class F>
void for_each_cell(const StructuralLaw& law, const Condition& c, F&& f) {
  for (std::size_t l = 0; l < law.num_contexts(); ++l) {
    if (c.context && *c.context != l) continue;
    for (std::size_t u = 0; u < law.num_u(); ++u) {
      for (int z = 0; z < 2; ++z) {
        if (c.z && *c.z != z) continue;
        for (int a = 0; a < 2; ++a) {
          if (c.natural && *c.natural != a) continue;
          const double w = law.p_l(l) * law.p_u(u) * law.p_z(z, l) * law.p_a(a, z, l, u);
          f(l, u, z, a, w);
        }
      }
    }
  }
}

void check_condition(const StructuralLaw& law, const Condition& c) {
  if (c.context && *c.context >= law.num_contexts()) {
    throw ValidationError("condition context out of range");
  }
  if ((c.natural && !is_binary(*c.natural)) || (c.z && !is_binary(*c.z))) {
    throw ValidationError("condition values must be binary");
  }
}

}  // namespace

double oracle_probability(const StructuralLaw& law, const Condition& condition) {
  check_condition(law, condition);
  double total = 0.0;
  for_each_cell(law, condition, [&](auto, auto, auto, auto, double w) { total += w; });
  return total;
}

double oracle_conditional_mean(const StructuralLaw& law, int a, const Condition& condition) {
  if (!is_binary(a)) throw ValidationError("treatment must be binary");
  check_condition(law, condition);
  double mass = 0.0, acc = 0.0;
  for_each_cell(law, condition, [&](std::size_t l, std::size_t u, int, int, double w) {
    mass += w;
    acc += w * law.mean_y(a, l, u);
  });
  if (!(mass > 0.0)) throw IdentificationError("conditioning event has probability zero");
  return acc / mass;
}

double oracle_value(const StructuralLaw& law, const Regime& regime,
                    std::optional<std::size_t> context) {
  if (regime.num_contexts() != law.num_contexts()) {
    throw ValidationError("regime context space does not match the law");
  }
  Condition c;
  c.context = context;
  check_condition(law, c);
  double mass = 0.0, acc = 0.0;
  for_each_cell(law, c, [&](std::size_t l, std::size_t u, int z, int a, double w) {
    mass += w;
    acc += w * law.mean_y(regime.assign(a, l, z), l, u);
  });
  if (!(mass > 0.0)) throw IdentificationError("conditioning event has probability zero");
  return acc / mass;
}

Regime true_regime(const StructuralLaw& law, RegimeKind kind) {
  const std::size_t nl = law.num_contexts();
  switch (kind) {
    case RegimeKind::optimal_L: {
      std::vector<std::uint8_t> t(nl);
      for (std::size_t l = 0; l < nl; ++l) {
        Condition c{std::nullopt, l, std::nullopt};
        t[l] = static_cast<std::uint8_t>(argmax_binary(oracle_conditional_mean(law, 0, c),
                                                       oracle_conditional_mean(law, 1, c), 1));
      }
      return Regime::optimal(std::move(t));
    }
    case RegimeKind::superoptimal_LA: {
      std::vector<std::uint8_t> t(nl * 2);
      for (std::size_t l = 0; l < nl; ++l) {
        for (int ap = 0; ap < 2; ++ap) {
          Condition c{ap, l, std::nullopt};
          t[l * 2 + ap] = static_cast<std::uint8_t>(argmax_binary(
              oracle_conditional_mean(law, 0, c), oracle_conditional_mean(law, 1, c), ap));
        }
      }
      return Regime::superoptimal(std::move(t));
    }
    case RegimeKind::superoptimal_LAZ: {
      std::vector<std::uint8_t> t(nl * 4);
      for (std::size_t l = 0; l < nl; ++l) {
        for (int z = 0; z < 2; ++z) {
          for (int ap = 0; ap < 2; ++ap) {
            Condition c{ap, l, z};
            t[(l * 2 + z) * 2 + ap] = static_cast<std::uint8_t>(argmax_binary(
                oracle_conditional_mean(law, 0, c), oracle_conditional_mean(law, 1, c), ap));
          }
        }
      }
      return Regime::superoptimal_z(std::move(t));
    }
    default:
      throw ValidationError("true_regime supports optimal_L, superoptimal_LA, superoptimal_LAZ");
  }
}

std::optional<SampleMode> parse_sample_mode(std::string_view text) {
  if (text == "observational") return SampleMode::observational;
  if (text == "two_arm_trial") return SampleMode::two_arm_trial;
  if (text == "preference_trial") return SampleMode::preference_trial;
  return std::nullopt;
}

namespace {

std::size_t draw_index(Rng& rng, const std::vector<double>& pmf) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double r = unif(rng), acc = 0.0;
  for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
    acc += pmf[i];
    if (r < acc) return i;
  }
  return pmf.size() - 1;
}

int draw_bit(Rng& rng, double p) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng) < p ? 1 : 0;
}

double draw_outcome(Rng& rng, const OutcomeNoise& noise, double mean) {
  switch (noise.kind) {
    case OutcomeNoise::Kind::degenerate: return mean;
    case OutcomeNoise::Kind::gaussian: {
      std::normal_distribution<double> g(mean, noise.sigma);
      return g(rng);
    }
    case OutcomeNoise::Kind::bernoulli: return draw_bit(rng, mean);
  }
  return mean;
}

}  // namespace

Dataset draw_sample(const StructuralLaw& law, std::size_t n, std::uint64_t seed, SampleMode mode) {
  if (n == 0) throw ValidationError("sample size must be positive");
  Rng rng = make_rng(seed);
  DatasetColumns c;
  c.z.reserve(n);
  c.context.reserve(n);
  c.y.reserve(n);
  const bool trial = mode != SampleMode::observational;
  const bool natural_recorded = mode != SampleMode::two_arm_trial;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t l = draw_index(rng, law.p_l_vector());
    const std::size_t u = draw_index(rng, law.p_u_vector());
    const int z = draw_bit(rng, law.p_z(1, l));
    const int a = draw_bit(rng, law.p_a1(z, l, u));
    int received = a;
    TrialArm arm = TrialArm::preference;
    if (mode == SampleMode::two_arm_trial) {
      received = draw_bit(rng, 0.5);
      arm = received ? TrialArm::assigned_1 : TrialArm::assigned_0;
    } else if (mode == SampleMode::preference_trial) {
      std::uniform_int_distribution<int> pick(0, 2);
      arm = static_cast<TrialArm>(pick(rng));
      received = arm == TrialArm::preference ? a : static_cast<int>(arm);
    }
    c.z.push_back(static_cast<std::uint8_t>(z));
    c.context.push_back(static_cast<std::uint32_t>(l));
    if (natural_recorded) c.a.push_back(static_cast<std::uint8_t>(a));
    if (trial) {
      c.a_star.push_back(static_cast<std::uint8_t>(received));
      c.arm.push_back(arm);
    }
    c.y.push_back(draw_outcome(rng, law.noise(), law.mean_y(received, l, u)));
  }
  return Dataset(law.schema(), trial ? RecordKind::trial : RecordKind::observational, true,
                 natural_recorded, std::move(c));
}

StructuralLaw random_law(Rng& rng, const RandomLawOptions& o) {
  if (o.num_contexts == 0 || o.num_u == 0) throw ValidationError("random law needs nonempty spaces");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto pmf = [&](std::size_t k) {
    std::vector<double> p(k);
    double s = 0.0;
    for (auto& v : p) s += (v = unif(rng));
    const double free_mass = 1.0 - o.floor * static_cast<double>(k);
    for (auto& v : p) v = o.floor + free_mass * v / s;
    // Renormalise so the pmf sums to 1 up to rounding.
    double t = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= t;
    return p;
  };
  auto interior = [&](double lo, double hi) { return lo + (hi - lo) * unif(rng); };

  std::vector<std::string> levels;
  for (std::size_t k = 0; k < o.num_contexts; ++k) levels.push_back(std::to_string(k));
  CovariateSchema schema(o.num_contexts == 1 ? std::vector<Covariate>{}
                                             : std::vector<Covariate>{{"l", levels}});
  const std::size_t nl = o.num_contexts, nu = o.num_u;
  auto p_u = pmf(nu);
  auto p_l = pmf(nl);
  std::vector<double> p_z1(nl);
  for (auto& v : p_z1) v = interior(o.floor, 1.0 - o.floor);

  std::vector<double> pa(nl * 2 * nu);
  for (std::size_t l = 0; l < nl; ++l) {
    if (o.iv_compliant) {
      const double mag = interior(o.min_instrument_strength, 0.5 - o.floor);
      const double d = unif(rng) < 0.5 ? -mag : mag;
      const double lo = d > 0 ? o.floor : o.floor - d;
      const double hi = d > 0 ? 1.0 - o.floor - d : 1.0 - o.floor;
      const double shared = interior(lo, hi);
      for (std::size_t u = 0; u < nu; ++u) {
        const double base = o.exchangeable ? shared : interior(lo, hi);
        pa[(l * 2 + 0) * nu + u] = base;
        pa[(l * 2 + 1) * nu + u] = base + d;
      }
    } else {
      for (int z = 0; z < 2; ++z) {
        const double shared = interior(o.floor, 1.0 - o.floor);
        for (std::size_t u = 0; u < nu; ++u) {
          pa[(l * 2 + z) * nu + u] = o.exchangeable ? shared : interior(o.floor, 1.0 - o.floor);
        }
      }
    }
  }
  std::vector<double> my(2 * nl * nu);
  for (auto& m : my) m = o.binary_outcome ? unif(rng) : interior(-1.0, 1.0);
  OutcomeNoise noise = o.binary_outcome ? OutcomeNoise{OutcomeNoise::Kind::bernoulli, 0.0}
                                        : OutcomeNoise{OutcomeNoise::Kind::gaussian, 1.0};
  return StructuralLaw(std::move(schema), std::move(p_u), std::move(p_l), std::move(p_z1),
                       std::move(pa), std::move(my), noise);
}

}  // namespace superopt
