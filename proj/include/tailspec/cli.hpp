#pragma once

namespace tailspec {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitNumericalError = 3,
};

/// Entry point of the `tailspec` tool (fit, simulate, diagnose).
int run_cli(int argc, char** argv);

} // namespace tailspec
