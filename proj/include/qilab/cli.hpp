#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qilab {

/// Exit codes: verdict outcomes first, then failure classes.
enum ExitCode : int {
  kExitConfirmed = 0,
  kExitRefuted = 1,
  kExitInconclusive = 2,
  kExitParseError = 3,
  kExitConfigError = 4,
  kExitFailure = 5,
};

/// Runs one command line (args[0] is the program name). Reports go to `out`
/// unless --out names a directory; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qilab
