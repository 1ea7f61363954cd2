#include "superopt/bounds.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <optional>

#include "superopt/dataset.hpp"

namespace superopt {

std::uint64_t TrialCounts::total() const { return arm_total(0) + arm_total(1); }

std::uint64_t TrialCounts::arm_total(int z) const {
  return n[0][0][z] + n[0][1][z] + n[1][0][z] + n[1][1][z];
}

double TrialCounts::q(int y, int a, int z) const {
  return static_cast<double>(n[y][a][z]) / static_cast<double>(arm_total(z));
}

void TrialCounts::validate() const {
  if (total() == 0) throw ValidationError("count table is empty");
  for (int z = 0; z < 2; ++z) {
    if (arm_total(z) == 0) throw ValidationError("instrument arm z=" + std::to_string(z) + " has no records");
  }
}

TrialCounts read_trial_counts(std::istream& in) {
  const RawTable raw = read_csv(in);
  std::optional<std::size_t> cy, ca, cz, cn;
  for (std::size_t j = 0; j < raw.header.size(); ++j) {
    const auto& h = raw.header[j];
    if (h == "y") cy = j;
    else if (h == "a") ca = j;
    else if (h == "z") cz = j;
    else if (h == "count") cn = j;
    else throw ValidationError("unexpected column '" + h + "' in counts file");
  }
  if (!cy || !ca || !cz || !cn) throw ValidationError("counts file needs columns y,a,z,count");
  TrialCounts c;
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& r = raw.rows[i];
    auto bit = [&](std::size_t col, const char* name) {
      if (r[col] != "0" && r[col] != "1") {
        throw ValidationError("row " + std::to_string(i + 1) + ", column " + name + ": expected 0 or 1");
      }
      return r[col] == "1" ? 1 : 0;
    };
    const int y = bit(*cy, "y"), a = bit(*ca, "a"), z = bit(*cz, "z");
    std::uint64_t v = 0;
    const auto& s = r[*cn];
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw ValidationError("row " + std::to_string(i + 1) + ", column count: not a nonnegative integer");
    }
    c.n[y][a][z] += v;
  }
  c.validate();
  return c;
}

TrialCounts load_trial_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return read_trial_counts(in);
}

bool satisfies_instrumental_inequality(const TrialCounts& counts, double tol) {
  counts.validate();
  for (int a = 0; a < 2; ++a) {
    double s = 0.0;
    for (int y = 0; y < 2; ++y) s += std::max(counts.q(y, a, 0), counts.q(y, a, 1));
    if (s > 1.0 + tol) return false;
  }
  return true;
}

namespace {

void require_compatible(const TrialCounts& counts) {
  if (!satisfies_instrumental_inequality(counts, 1e-12)) {
    throw IdentificationError("counts violate the instrumental inequality; no response-type law fits them");
  }
}

double max_of(std::initializer_list<double> v) { return std::max(v); }
double min_of(std::initializer_list<double> v) { return std::min(v); }

IntervalBound make_interval(double lo, double hi) {
  // Closed forms can cross by rounding when the interval is a point.
  if (lo > hi && lo - hi < 1e-12) hi = lo;
  return IntervalBound(lo, hi);
}

}  // namespace

IntervalBound balke_pearl_ate_bounds(const TrialCounts& c) {
  require_compatible(c);
  auto q = [&](int y, int a, int z) { return c.q(y, a, z); };
  const double lo = max_of({
      q(1, 1, 1) + q(0, 0, 0) - 1.0,
      q(1, 1, 0) + q(0, 0, 1) - 1.0,
      q(1, 1, 0) - q(1, 1, 1) - q(1, 0, 1) - q(0, 1, 0) - q(1, 0, 0),
      q(1, 1, 1) - q(1, 1, 0) - q(1, 0, 0) - q(0, 1, 1) - q(1, 0, 1),
      -q(0, 1, 1) - q(1, 0, 1),
      -q(0, 1, 0) - q(1, 0, 0),
      q(0, 0, 1) - q(0, 1, 1) - q(1, 0, 1) - q(0, 1, 0) - q(0, 0, 0),
      q(0, 0, 0) - q(0, 1, 0) - q(1, 0, 0) - q(0, 1, 1) - q(0, 0, 1),
  });
  const double hi = min_of({
      1.0 - q(0, 1, 1) - q(1, 0, 0),
      1.0 - q(0, 1, 0) - q(1, 0, 1),
      -q(0, 1, 0) + q(0, 1, 1) + q(0, 0, 1) + q(1, 1, 0) + q(0, 0, 0),
      -q(0, 1, 1) + q(1, 1, 1) + q(0, 0, 1) + q(0, 1, 0) + q(0, 0, 0),
      q(1, 1, 1) + q(0, 0, 1),
      q(1, 1, 0) + q(0, 0, 0),
      -q(1, 0, 1) + q(1, 1, 1) + q(0, 0, 1) + q(1, 1, 0) + q(1, 0, 0),
      -q(1, 0, 0) + q(1, 1, 0) + q(0, 0, 0) + q(1, 1, 1) + q(1, 0, 1),
  });
  return make_interval(lo, hi);
}

IntervalBound potential_outcome_bounds(const TrialCounts& c, int a) {
  require_compatible(c);
  // Written for E(Y^1); E(Y^0) follows by relabelling the treatment.
  auto q = [&](int y, int t, int z) { return c.q(y, a == 1 ? t : 1 - t, z); };
  double lo = 0.0, hi = 1.0;
  for (int z = 0; z < 2; ++z) {
    const int w = 1 - z;
    lo = std::max({lo, q(1, 1, z), q(1, 0, z) + q(1, 1, z) - q(0, 1, w) - q(1, 0, w),
                   q(0, 0, z) + q(1, 1, z) - q(0, 0, w) - q(0, 1, w)});
    hi = std::min({hi, 1.0 - q(0, 1, z), 1.0 + q(1, 0, z) + q(1, 1, z) - q(0, 1, w) - q(1, 0, w),
                   1.0 + q(0, 0, z) + q(1, 1, z) - q(0, 0, w) - q(0, 1, w)});
  }
  return make_interval(lo, hi);
}

IntervalBound natural_att_bounds(const TrialCounts& c, int a_prime) {
  if (!is_binary(a_prime)) throw ValidationError("a' must be 0 or 1");
  require_compatible(c);
  const double n = static_cast<double>(c.total());
  // Pooled-sample joint probabilities P(Y=y, A=a).
  auto joint = [&](int y, int a) { return static_cast<double>(c.n[y][a][0] + c.n[y][a][1]) / n; };
  const double p_nat = joint(0, a_prime) + joint(1, a_prime);
  if (p_nat <= 0.0) throw IdentificationError("no records with A=" + std::to_string(a_prime));
  const double ey_nat = joint(1, a_prime) / p_nat;
  // E(Y^b | A=a') for b ≠ a' is [E(Y^b) − E(Y I(A=b))] / P(A=a').
  const int b = 1 - a_prime;
  const IntervalBound other = potential_outcome_bounds(c, b);
  const double lo_cross = (other.lo - joint(1, b)) / p_nat;
  const double hi_cross = (other.hi - joint(1, b)) / p_nat;
  if (a_prime == 1) return make_interval(ey_nat - hi_cross, ey_nat - lo_cross);
  return make_interval(lo_cross - ey_nat, hi_cross - ey_nat);
}

}  // namespace superopt
