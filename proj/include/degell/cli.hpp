#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace degell {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
/// Incompatible data, or a check that ran and failed.
inline constexpr int kExitNegative = 2;

/// Runs `degell <command> <spec> [flags]`; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace degell
