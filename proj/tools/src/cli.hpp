#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace superopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point of the `superopt` tool. Subcommands: simulate, fit, value,
/// bounds, diagnose, serve. Validation errors exit 1, identification and
/// numerical failures exit 2; messages go to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace superopt::cli
