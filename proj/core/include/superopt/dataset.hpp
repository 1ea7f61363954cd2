#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "superopt/types.hpp"

namespace superopt {

struct Covariate {
  std::string name;
  std::vector<std::string> levels;

  std::optional<std::size_t> level_index(std::string_view level) const;
  bool operator==(const Covariate&) const = default;
};

/// Finite categorical covariate space. Contexts are the cells of the
/// Cartesian product of levels, encoded mixed-radix with the first
/// covariate as the most significant digit. An empty schema has exactly
/// one context.
class CovariateSchema {
 public:
  CovariateSchema() = default;
  explicit CovariateSchema(std::vector<Covariate> covariates);

  const std::vector<Covariate>& covariates() const { return covariates_; }
  bool empty() const { return covariates_.empty(); }
  std::size_t num_contexts() const { return num_contexts_; }

  std::size_t encode(std::span<const std::size_t> level_indices) const;
  std::vector<std::size_t> decode(std::size_t context) const;

  /// "name=level,name=level"; the single context of an empty schema is "*".
  std::string label(std::size_t context) const;
  std::map<std::string, std::string> assignment(std::size_t context) const;

  /// Resolves a name→level map to a context. Throws ValidationError naming
  /// the offending covariate on unknown names, levels, or missing entries.
  std::size_t resolve(const std::map<std::string, std::string>& values) const;

  bool operator==(const CovariateSchema& other) const {
    return covariates_ == other.covariates_;
  }

 private:
  std::vector<Covariate> covariates_;
  std::size_t num_contexts_ = 1;
};

enum class TrialArm : std::uint8_t { assigned_0 = 0, assigned_1 = 1, preference = 2 };

std::string_view to_string(TrialArm arm);
std::optional<TrialArm> parse_arm(std::string_view text);

struct Observation {
  std::optional<int> z;
  std::size_t context = 0;
  int a = 0;
  double y = 0.0;
};

struct PreferenceTrialRecord {
  std::optional<int> z;
  std::size_t context = 0;
  std::optional<int> a;  // natural (stated) treatment; absent in two-arm trials
  int a_star = 0;
  TrialArm arm = TrialArm::assigned_0;
  double y = 0.0;
};

enum class RecordKind { observational, trial };

/// Column storage used to build a Dataset. Unused columns stay empty.
struct DatasetColumns {
  std::vector<std::uint8_t> z;
  std::vector<std::uint32_t> context;
  std::vector<std::uint8_t> a;
  std::vector<std::uint8_t> a_star;
  std::vector<TrialArm> arm;
  std::vector<double> y;
};

struct LevelCount {
  std::string level;
  std::size_t count = 0;
};

struct ColumnSummary {
  std::string column;
  std::vector<LevelCount> counts;  // categorical and binary columns
  std::optional<double> min;       // y only
  std::optional<double> max;
};

/// Immutable tabular sample. Construction validates every invariant, so a
/// Dataset that exists is well formed.
class Dataset {
 public:
  Dataset(CovariateSchema schema, RecordKind kind, bool has_instrument,
          bool has_natural, DatasetColumns columns);

  const CovariateSchema& schema() const { return schema_; }
  RecordKind kind() const { return kind_; }
  bool has_instrument() const { return has_instrument_; }
  bool has_natural() const { return has_natural_; }
  std::size_t size() const { return cols_.y.size(); }
  std::size_t num_contexts() const { return schema_.num_contexts(); }

  std::span<const std::uint8_t> z() const { return cols_.z; }
  std::span<const std::uint32_t> context() const { return cols_.context; }
  std::span<const std::uint8_t> a() const { return cols_.a; }
  std::span<const std::uint8_t> a_star() const { return cols_.a_star; }
  std::span<const TrialArm> arm() const { return cols_.arm; }
  std::span<const double> y() const { return cols_.y; }

  Observation row(std::size_t i) const;
  PreferenceTrialRecord trial_row(std::size_t i) const;

  /// True when every outcome is exactly 0 or 1.
  bool outcome_binary() const { return outcome_binary_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }

  /// Rows at the given positions, in order; duplicates allowed.
  Dataset subset(std::span<const std::size_t> rows) const;

  std::vector<ColumnSummary> summary() const;

  /// Throws ValidationError unless the instrument column is present.
  void require_instrument(std::string_view operation) const;

  bool operator==(const Dataset& other) const;

 private:
  CovariateSchema schema_;
  RecordKind kind_;
  bool has_instrument_;
  bool has_natural_;
  DatasetColumns cols_;
  bool outcome_binary_ = true;
  double y_min_ = 0.0;
  double y_max_ = 0.0;
};

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_csv(std::istream& in);
RawTable read_csv_file(const std::string& path);

/// Validates raw CSV rows against the reserved-column convention (z, a,
/// a_star, arm, y; every other column a categorical covariate). When a
/// schema is declared, covariate names and levels must match it; otherwise
/// levels are inferred and sorted. All row-level problems are collected and
/// reported together, each with its 1-based data row and column.
Dataset validate_dataset(const RawTable& raw,
                         const std::optional<CovariateSchema>& declared = std::nullopt);

Dataset load_dataset(const std::string& path,
                     const std::optional<CovariateSchema>& declared = std::nullopt);

void write_dataset_csv(const Dataset& data, std::ostream& out);

/// Shortest decimal text that parses back to the same double.
std::string format_exact(double value);

/// FNV-1a over the canonical CSV text of the dataset.
std::uint64_t fingerprint(const Dataset& data);

}  // namespace superopt
