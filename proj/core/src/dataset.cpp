#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include "superopt/dataset.hpp"

namespace superopt {

std::optional<std::size_t> Covariate::level_index(std::string_view level) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == level) return i;
  }
  return std::nullopt;
}

CovariateSchema::CovariateSchema(std::vector<Covariate> covariates)
    : covariates_(std::move(covariates)) {
  std::set<std::string> names;
  num_contexts_ = 1;
  for (const auto& c : covariates_) {
    if (c.levels.empty()) throw ValidationError("covariate '" + c.name + "' has no levels");
    if (!names.insert(c.name).second) {
      throw ValidationError("duplicate covariate '" + c.name + "'");
    }
    std::set<std::string> lv(c.levels.begin(), c.levels.end());
    if (lv.size() != c.levels.size()) {
      throw ValidationError("covariate '" + c.name + "' has duplicate levels");
    }
    num_contexts_ *= c.levels.size();
  }
}

std::size_t CovariateSchema::encode(std::span<const std::size_t> level_indices) const {
  if (level_indices.size() != covariates_.size()) {
    throw std::invalid_argument("context arity mismatch");
  }
  std::size_t idx = 0;
  for (std::size_t k = 0; k < covariates_.size(); ++k) {
    idx = idx * covariates_[k].levels.size() + level_indices[k];
  }
  return idx;
}

std::vector<std::size_t> CovariateSchema::decode(std::size_t context) const {
  std::vector<std::size_t> out(covariates_.size());
  for (std::size_t k = covariates_.size(); k-- > 0;) {
    const auto radix = covariates_[k].levels.size();
    out[k] = context % radix;
    context /= radix;
  }
  return out;
}

std::string CovariateSchema::label(std::size_t context) const {
  if (covariates_.empty()) return "*";
  auto lv = decode(context);
  std::string s;
  for (std::size_t k = 0; k < covariates_.size(); ++k) {
    if (k) s += ',';
    s += covariates_[k].name + "=" + covariates_[k].levels[lv[k]];
  }
  return s;
}

std::map<std::string, std::string> CovariateSchema::assignment(std::size_t context) const {
  std::map<std::string, std::string> out;
  auto lv = decode(context);
  for (std::size_t k = 0; k < covariates_.size(); ++k) {
    out[covariates_[k].name] = covariates_[k].levels[lv[k]];
  }
  return out;
}

std::size_t CovariateSchema::resolve(const std::map<std::string, std::string>& values) const {
  for (const auto& [name, level] : values) {
    bool known = std::any_of(covariates_.begin(), covariates_.end(),
                             [&](const Covariate& c) { return c.name == name; });
    if (!known) throw ValidationError("unknown covariate '" + name + "'");
  }
  std::vector<std::size_t> lv(covariates_.size());
  for (std::size_t k = 0; k < covariates_.size(); ++k) {
    auto it = values.find(covariates_[k].name);
    if (it == values.end()) {
      throw ValidationError("missing covariate '" + covariates_[k].name + "'");
    }
    auto li = covariates_[k].level_index(it->second);
    if (!li) {
      throw ValidationError("unknown level '" + it->second + "' for covariate '" +
                            covariates_[k].name + "'");
    }
    lv[k] = *li;
  }
  return encode(lv);
}

std::string_view to_string(TrialArm arm) {
  switch (arm) {
    case TrialArm::assigned_0: return "assigned_0";
    case TrialArm::assigned_1: return "assigned_1";
    case TrialArm::preference: return "preference";
  }
  return "?";
}

std::optional<TrialArm> parse_arm(std::string_view text) {
  if (text == "assigned_0") return TrialArm::assigned_0;
  if (text == "assigned_1") return TrialArm::assigned_1;
  if (text == "preference") return TrialArm::preference;
  return std::nullopt;
}

Dataset::Dataset(CovariateSchema schema, RecordKind kind, bool has_instrument, bool has_natural,
                 DatasetColumns columns)
    : schema_(std::move(schema)),
      kind_(kind),
      has_instrument_(has_instrument),
      has_natural_(has_natural),
      cols_(std::move(columns)) {
  const std::size_t n = cols_.y.size();
  if (n == 0) throw ValidationError("dataset is empty");
  auto check_len = [&](std::size_t len, bool required, const char* name) {
    if (required ? len != n : len != 0) {
      throw ValidationError(std::string("column '") + name + "' has inconsistent length");
    }
  };
  check_len(cols_.context.size(), true, "context");
  check_len(cols_.z.size(), has_instrument_, "z");
  check_len(cols_.a.size(), has_natural_, "a");
  check_len(cols_.a_star.size(), kind_ == RecordKind::trial, "a_star");
  check_len(cols_.arm.size(), kind_ == RecordKind::trial, "arm");
  if (kind_ == RecordKind::observational && !has_natural_) {
    throw ValidationError("observational data requires the natural treatment column 'a'");
  }
  y_min_ = cols_.y[0];
  y_max_ = cols_.y[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double y = cols_.y[i];
    if (!std::isfinite(y)) throw ValidationError("row " + std::to_string(i + 1) + ": y not finite");
    if (y != 0.0 && y != 1.0) outcome_binary_ = false;
    y_min_ = std::min(y_min_, y);
    y_max_ = std::max(y_max_, y);
    if (cols_.context[i] >= schema_.num_contexts()) {
      throw ValidationError("row " + std::to_string(i + 1) + ": context out of range");
    }
    if (has_instrument_ && cols_.z[i] > 1) throw ValidationError("z outside {0,1}");
    if (has_natural_ && cols_.a[i] > 1) throw ValidationError("a outside {0,1}");
    if (kind_ == RecordKind::trial) {
      if (cols_.a_star[i] > 1) throw ValidationError("a_star outside {0,1}");
      if (cols_.arm[i] == TrialArm::preference && has_natural_ && cols_.a_star[i] != cols_.a[i]) {
        throw ValidationError("row " + std::to_string(i + 1) +
                              ": preference arm requires a_star = a");
      }
      if (cols_.arm[i] == TrialArm::preference && !has_natural_) {
        throw ValidationError("row " + std::to_string(i + 1) +
                              ": preference arm requires the natural treatment column");
      }
      if (cols_.arm[i] == TrialArm::assigned_0 && cols_.a_star[i] != 0) {
        throw ValidationError("row " + std::to_string(i + 1) + ": assigned_0 requires a_star = 0");
      }
      if (cols_.arm[i] == TrialArm::assigned_1 && cols_.a_star[i] != 1) {
        throw ValidationError("row " + std::to_string(i + 1) + ": assigned_1 requires a_star = 1");
      }
    }
  }
}

Observation Dataset::row(std::size_t i) const {
  Observation o;
  if (has_instrument_) o.z = cols_.z[i];
  o.context = cols_.context[i];
  o.a = has_natural_ ? cols_.a[i] : cols_.a_star[i];
  o.y = cols_.y[i];
  return o;
}

PreferenceTrialRecord Dataset::trial_row(std::size_t i) const {
  if (kind_ != RecordKind::trial) throw ValidationError("dataset holds no trial records");
  PreferenceTrialRecord r;
  if (has_instrument_) r.z = cols_.z[i];
  r.context = cols_.context[i];
  if (has_natural_) r.a = cols_.a[i];
  r.a_star = cols_.a_star[i];
  r.arm = cols_.arm[i];
  r.y = cols_.y[i];
  return r;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  DatasetColumns c;
  auto take = [&](const auto& src, auto& dst) {
    if (src.empty()) return;
    dst.reserve(rows.size());
    for (auto r : rows) dst.push_back(src.at(r));
  };
  take(cols_.z, c.z);
  take(cols_.context, c.context);
  take(cols_.a, c.a);
  take(cols_.a_star, c.a_star);
  take(cols_.arm, c.arm);
  take(cols_.y, c.y);
  return Dataset(schema_, kind_, has_instrument_, has_natural_, std::move(c));
}

std::vector<ColumnSummary> Dataset::summary() const {
  std::vector<ColumnSummary> out;
  auto binary_col = [&](const char* name, std::span<const std::uint8_t> col) {
    if (col.empty()) return;
    ColumnSummary s{name, {{"0", 0}, {"1", 0}}, {}, {}};
    for (auto v : col) ++s.counts[v].count;
    out.push_back(std::move(s));
  };
  binary_col("z", cols_.z);
  for (std::size_t k = 0; k < schema_.covariates().size(); ++k) {
    const auto& cov = schema_.covariates()[k];
    ColumnSummary s{cov.name, {}, {}, {}};
    for (const auto& lv : cov.levels) s.counts.push_back({lv, 0});
    for (auto ctx : cols_.context) ++s.counts[schema_.decode(ctx)[k]].count;
    out.push_back(std::move(s));
  }
  binary_col("a", cols_.a);
  binary_col("a_star", cols_.a_star);
  if (!cols_.arm.empty()) {
    ColumnSummary s{"arm", {{"assigned_0", 0}, {"assigned_1", 0}, {"preference", 0}}, {}, {}};
    for (auto arm : cols_.arm) ++s.counts[static_cast<std::size_t>(arm)].count;
    out.push_back(std::move(s));
  }
  out.push_back(ColumnSummary{"y", {}, y_min_, y_max_});
  return out;
}

void Dataset::require_instrument(std::string_view operation) const {
  if (!has_instrument_) {
    throw ValidationError(std::string(operation) + " requires the instrument column 'z'");
  }
}

bool Dataset::operator==(const Dataset& o) const {
  return schema_ == o.schema_ && kind_ == o.kind_ && has_instrument_ == o.has_instrument_ &&
         has_natural_ == o.has_natural_ && cols_.z == o.cols_.z &&
         cols_.context == o.cols_.context && cols_.a == o.cols_.a &&
         cols_.a_star == o.cols_.a_star && cols_.arm == o.cols_.arm && cols_.y == o.cols_.y;
}

namespace {

constexpr std::string_view kReserved[] = {"z", "a", "a_star", "arm", "y"};

bool is_reserved(std::string_view name) {
  return std::find(std::begin(kReserved), std::end(kReserved), name) != std::end(kReserved);
}

std::optional<double> parse_real(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = text.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<std::uint8_t> parse_bit(const std::string& text) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  return std::nullopt;
}

// Levels that all parse as numbers sort numerically; otherwise lexically.
std::vector<std::string> sorted_levels(const std::set<std::string>& seen) {
  std::vector<std::string> levels(seen.begin(), seen.end());
  bool numeric = std::all_of(levels.begin(), levels.end(),
                             [](const std::string& s) { return parse_real(s).has_value(); });
  if (numeric) {
    std::stable_sort(levels.begin(), levels.end(), [](const std::string& x, const std::string& y) {
      return *parse_real(x) < *parse_real(y);
    });
  }
  return levels;
}

}  // namespace

Dataset validate_dataset(const RawTable& raw, const std::optional<CovariateSchema>& declared) {
  std::map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < raw.header.size(); ++j) {
    if (raw.header[j].empty()) throw ValidationError("empty column name at position " + std::to_string(j + 1));
    if (!col.emplace(raw.header[j], j).second) {
      throw ValidationError("duplicate column '" + raw.header[j] + "'");
    }
  }
  const bool trial = col.count("a_star") || col.count("arm");
  if (trial && !(col.count("a_star") && col.count("arm"))) {
    throw ValidationError("missing required column '" +
                          std::string(col.count("a_star") ? "arm" : "a_star") + "'");
  }
  if (!col.count("y")) throw ValidationError("missing required column 'y'");
  if (!trial && !col.count("a")) throw ValidationError("missing required column 'a'");
  const bool has_z = col.count("z") > 0;
  const bool has_a = col.count("a") > 0;

  std::vector<std::size_t> cov_cols;
  for (std::size_t j = 0; j < raw.header.size(); ++j) {
    if (!is_reserved(raw.header[j])) cov_cols.push_back(j);
  }

  CovariateSchema schema;
  if (declared) {
    if (declared->covariates().size() != cov_cols.size()) {
      throw ValidationError("covariate columns do not match the declared schema");
    }
    std::vector<std::size_t> ordered;
    for (const auto& c : declared->covariates()) {
      auto it = col.find(c.name);
      if (it == col.end()) throw ValidationError("missing required column '" + c.name + "'");
      ordered.push_back(it->second);
    }
    cov_cols = ordered;
    schema = *declared;
  } else {
    std::vector<Covariate> covs;
    for (auto j : cov_cols) {
      std::set<std::string> seen;
      for (const auto& r : raw.rows) seen.insert(r[j]);
      covs.push_back({raw.header[j], sorted_levels(seen)});
    }
    schema = CovariateSchema(std::move(covs));
  }

  std::vector<std::string> problems;
  auto report = [&](std::size_t row, const std::string& column, const std::string& what) {
    if (problems.size() < 50) {
      problems.push_back("row " + std::to_string(row + 1) + ", column '" + column + "': " + what);
    }
  };

  DatasetColumns c;
  const std::size_t n = raw.rows.size();
  c.y.reserve(n);
  c.context.reserve(n);
  std::vector<std::size_t> lv(cov_cols.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = raw.rows[i];
    bool ok = true;
    if (has_z) {
      auto v = parse_bit(r[col["z"]]);
      if (!v) { report(i, "z", "value '" + r[col["z"]] + "' outside {0,1}"); ok = false; }
      c.z.push_back(v.value_or(0));
    }
    if (has_a) {
      auto v = parse_bit(r[col["a"]]);
      if (!v) { report(i, "a", "value '" + r[col["a"]] + "' outside {0,1}"); ok = false; }
      c.a.push_back(v.value_or(0));
    }
    if (trial) {
      auto v = parse_bit(r[col["a_star"]]);
      if (!v) { report(i, "a_star", "value '" + r[col["a_star"]] + "' outside {0,1}"); ok = false; }
      c.a_star.push_back(v.value_or(0));
      auto arm = parse_arm(r[col["arm"]]);
      if (!arm) { report(i, "arm", "unknown arm '" + r[col["arm"]] + "'"); ok = false; }
      c.arm.push_back(arm.value_or(TrialArm::assigned_0));
      if (ok) {
        if (*arm == TrialArm::preference && has_a && *v != c.a.back()) {
          report(i, "a_star", "preference arm requires a_star = a");
        } else if (*arm == TrialArm::preference && !has_a) {
          report(i, "arm", "preference arm requires column 'a'");
        } else if (*arm == TrialArm::assigned_0 && *v != 0) {
          report(i, "a_star", "assigned_0 requires a_star = 0");
        } else if (*arm == TrialArm::assigned_1 && *v != 1) {
          report(i, "a_star", "assigned_1 requires a_star = 1");
        }
      }
    }
    auto y = parse_real(r[col["y"]]);
    if (!y || !std::isfinite(*y)) report(i, "y", "value '" + r[col["y"]] + "' is not a finite real");
    c.y.push_back(y && std::isfinite(*y) ? *y : 0.0);
    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
      const auto& text = r[cov_cols[k]];
      auto li = schema.covariates()[k].level_index(text);
      if (!li) {
        report(i, schema.covariates()[k].name, "unknown categorical level '" + text + "'");
        lv[k] = 0;
      } else {
        lv[k] = *li;
      }
    }
    c.context.push_back(static_cast<std::uint32_t>(schema.encode(lv)));
  }
  if (!problems.empty()) {
    std::string msg = "invalid dataset:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError(msg);
  }
  if (n == 0) throw ValidationError("dataset is empty");
  return Dataset(std::move(schema), trial ? RecordKind::trial : RecordKind::observational, has_z,
                 has_a, std::move(c));
}

Dataset load_dataset(const std::string& path, const std::optional<CovariateSchema>& declared) {
  return validate_dataset(read_csv_file(path), declared);
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

}  // namespace

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  std::vector<std::string> header;
  if (data.has_instrument()) header.push_back("z");
  for (const auto& c : data.schema().covariates()) header.push_back(quote_if_needed(c.name));
  if (data.has_natural()) header.push_back("a");
  if (data.kind() == RecordKind::trial) {
    header.push_back("a_star");
    header.push_back("arm");
  }
  header.push_back("y");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  const auto& covs = data.schema().covariates();
  for (std::size_t i = 0; i < data.size(); ++i) {
    bool first = true;
    auto sep = [&] {
      if (!first) out << ',';
      first = false;
    };
    if (data.has_instrument()) { sep(); out << int(data.z()[i]); }
    auto lv = data.schema().decode(data.context()[i]);
    for (std::size_t k = 0; k < covs.size(); ++k) { sep(); out << quote_if_needed(covs[k].levels[lv[k]]); }
    if (data.has_natural()) { sep(); out << int(data.a()[i]); }
    if (data.kind() == RecordKind::trial) {
      sep(); out << int(data.a_star()[i]);
      sep(); out << to_string(data.arm()[i]);
    }
    sep();
    out << format_exact(data.y()[i]);
    out << '\n';
  }
}

std::uint64_t fingerprint(const Dataset& data) {
  std::ostringstream os;
  write_dataset_csv(data, os);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace superopt
