#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace superopt {

enum class RegimeKind { observed, optimal_L, superoptimal_LA, superoptimal_LAZ, explicit_table };

/// Which inputs a regime table is keyed on.
enum class RegimeInputs { none, context, natural_context, natural_context_instrument };

std::string_view to_string(RegimeKind kind);
std::optional<RegimeKind> parse_regime_kind(std::string_view text);

/// A deterministic decision rule with binary output. The table is total
/// over its key space:
///   context:                    [l]
///   natural_context:            [l][a']
///   natural_context_instrument: [l][z][a']
class Regime {
 public:
  /// The factual regime: assigns the natural treatment.
  static Regime observed(std::size_t num_contexts);
  static Regime optimal(std::vector<std::uint8_t> by_context);
  /// `table` indexed [l * 2 + a'].
  static Regime superoptimal(std::vector<std::uint8_t> table);
  /// `table` indexed [(l * 2 + z) * 2 + a'].
  static Regime superoptimal_z(std::vector<std::uint8_t> table);
  static Regime explicit_table(RegimeInputs inputs, std::size_t num_contexts,
                               std::vector<std::uint8_t> table);
  /// Constant rule a ∈ {0,1}, keyed on context.
  static Regime constant(std::size_t num_contexts, int a);

  RegimeKind kind() const { return kind_; }
  RegimeInputs inputs() const { return inputs_; }
  std::size_t num_contexts() const { return num_contexts_; }
  const std::vector<std::uint8_t>& table() const { return table_; }

  /// Assigned treatment for natural value `natural` in `context`. Regimes
  /// keyed on the instrument require `z`.
  int assign(int natural, std::size_t context, std::optional<int> z = std::nullopt) const;

  bool uses_instrument() const { return inputs_ == RegimeInputs::natural_context_instrument; }

  bool operator==(const Regime&) const = default;

 private:
  Regime(RegimeKind kind, RegimeInputs inputs, std::size_t num_contexts,
         std::vector<std::uint8_t> table);

  RegimeKind kind_ = RegimeKind::observed;
  RegimeInputs inputs_ = RegimeInputs::none;
  std::size_t num_contexts_ = 1;
  std::vector<std::uint8_t> table_;
};

std::size_t table_size(RegimeInputs inputs, std::size_t num_contexts);

}  // namespace superopt
