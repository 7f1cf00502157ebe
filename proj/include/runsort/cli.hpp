#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace runsort {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvariantViolated = 1,
  kExitUsage = 2,
  kExitResourceLimit = 3,
};

/// Runs one command. `args` excludes the program name, e.g.
/// {"ptilde", "--n", "4", "--i", "3", "--j", "2"}. Reports go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace runsort
