#include "superopt/regime.hpp"

#include <algorithm>
#include <stdexcept>

#include "superopt/types.hpp"

namespace superopt {

std::string_view to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::observed: return "observed";
    case RegimeKind::optimal_L: return "optimal_L";
    case RegimeKind::superoptimal_LA: return "superoptimal_LA";
    case RegimeKind::superoptimal_LAZ: return "superoptimal_LAZ";
    case RegimeKind::explicit_table: return "explicit_table";
  }
  return "?";
}

std::optional<RegimeKind> parse_regime_kind(std::string_view text) {
  for (auto k : {RegimeKind::observed, RegimeKind::optimal_L, RegimeKind::superoptimal_LA,
                 RegimeKind::superoptimal_LAZ, RegimeKind::explicit_table}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::size_t table_size(RegimeInputs inputs, std::size_t num_contexts) {
  switch (inputs) {
    case RegimeInputs::none: return 0;
    case RegimeInputs::context: return num_contexts;
    case RegimeInputs::natural_context: return 2 * num_contexts;
    case RegimeInputs::natural_context_instrument: return 4 * num_contexts;
  }
  return 0;
}

Regime::Regime(RegimeKind kind, RegimeInputs inputs, std::size_t num_contexts,
               std::vector<std::uint8_t> table)
    : kind_(kind), inputs_(inputs), num_contexts_(num_contexts), table_(std::move(table)) {
  if (num_contexts_ == 0) throw ValidationError("regime needs at least one context");
  if (table_.size() != table_size(inputs_, num_contexts_)) {
    throw ValidationError("regime table is not total over its key space");
  }
  if (std::any_of(table_.begin(), table_.end(), [](std::uint8_t v) { return v > 1; })) {
    throw ValidationError("regime table assigns a value outside {0,1}");
  }
}

Regime Regime::observed(std::size_t num_contexts) {
  return Regime(RegimeKind::observed, RegimeInputs::none, num_contexts, {});
}

Regime Regime::optimal(std::vector<std::uint8_t> by_context) {
  const auto n = by_context.size();
  return Regime(RegimeKind::optimal_L, RegimeInputs::context, n, std::move(by_context));
}

Regime Regime::superoptimal(std::vector<std::uint8_t> table) {
  const auto n = table.size() / 2;
  return Regime(RegimeKind::superoptimal_LA, RegimeInputs::natural_context, n, std::move(table));
}

Regime Regime::superoptimal_z(std::vector<std::uint8_t> table) {
  const auto n = table.size() / 4;
  return Regime(RegimeKind::superoptimal_LAZ, RegimeInputs::natural_context_instrument, n,
                std::move(table));
}

Regime Regime::explicit_table(RegimeInputs inputs, std::size_t num_contexts,
                              std::vector<std::uint8_t> table) {
  if (inputs == RegimeInputs::none) {
    throw ValidationError("explicit regime needs a keyed table");
  }
  return Regime(RegimeKind::explicit_table, inputs, num_contexts, std::move(table));
}

Regime Regime::constant(std::size_t num_contexts, int a) {
  return Regime(RegimeKind::explicit_table, RegimeInputs::context, num_contexts,
                std::vector<std::uint8_t>(num_contexts, static_cast<std::uint8_t>(a)));
}

int Regime::assign(int natural, std::size_t context, std::optional<int> z) const {
  if (context >= num_contexts_) throw ValidationError("regime has no entry for context");
  switch (inputs_) {
    case RegimeInputs::none: return natural;
    case RegimeInputs::context: return table_[context];
    case RegimeInputs::natural_context: return table_[context * 2 + natural];
    case RegimeInputs::natural_context_instrument:
      if (!z) throw ValidationError("regime keyed on the instrument needs z");
      return table_[(context * 2 + *z) * 2 + natural];
  }
  return natural;
}

}  // namespace superopt
