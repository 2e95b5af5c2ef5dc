#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfe {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitSolver = 2,
  kExitDivergent = 3,
};

/// Runs one CLI invocation; args exclude the program name. Diagnostics go to
/// `err`, progress lines to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfe
