#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace interlock::cli {

/// Exit codes of every subcommand.
enum Exit : int {
  ok = 0,
  violation = 1,
  tool_error = 2,
};

/// Runs the interlock-smc command line. `args` excludes the program name.
/// Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace interlock::cli
