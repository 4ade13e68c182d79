#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace waz::cli {

/// Exit codes: 0 success, 1 numerical failure, 2 configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

/// Runs the command line `args` (without the program name), writing results
/// to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace waz::cli
