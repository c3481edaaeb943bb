#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adwords {

// Process exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the command-line tool. `args` excludes the program name.
// Data goes to `out` (or the --out file); diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adwords
