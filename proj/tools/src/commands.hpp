#pragma once

#include <ostream>

namespace twophoton::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUnexpected = 1,
  kConfigFailure = 2,
  kRegimeFailure = 3,
  kNumericFailure = 4,
};

// Parses arguments, dispatches the subcommand and maps failures to exit codes.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace twophoton::cli
