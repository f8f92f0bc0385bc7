#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ggdr::cli {

/// Exit codes of the `ggdr` tool.
enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kValidationError = 2,
  kNumericalError = 3,
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Diagnostics go to `err`, results to `out`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace ggdr::cli
