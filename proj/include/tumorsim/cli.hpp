#pragma once

#include <ostream>

namespace tumorsim {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  ///< audit failure or numerical breakdown
  kExitUsage = 2,    ///< bad arguments or configuration
};

/// Entry point of the `tumorsim` tool with subcommands run, verify and
/// scenarios. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tumorsim
