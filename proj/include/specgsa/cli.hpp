#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace specgsa::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitIo = 3,
  kExitNoAdmissible = 4,
  kExitDivergence = 5,
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code. Primary output goes to `out`, diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace specgsa::cli
