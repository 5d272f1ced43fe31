#pragma once

#include <iosfwd>

namespace ctp {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,           // bad flags, unreadable or invalid net, bad query
  kExitZeroEvidence = 2,    // posterior with probability-0 evidence
  kExitOracleMismatch = 3,  // --check found a disagreement
};

/// Runs the `ctp` command with the given arguments, writing results to `out`
/// and diagnostics to `err`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctp
