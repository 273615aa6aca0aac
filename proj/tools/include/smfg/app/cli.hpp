#pragma once

#include <ostream>

namespace smfg::app {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kConfigFailure = 1,
  kNumericalFailure = 2,
  kIoFailure = 3,
};

/// Entry point of the smfg executable. A failed property check or
/// refinement study exits with kNumericalFailure.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace smfg::app
