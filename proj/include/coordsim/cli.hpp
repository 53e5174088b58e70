#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace coordsim::cli {

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kNumericFailure = 2 };

/// Entry point shared by the `coordsim` binary and the tests. `args` excludes
/// the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Applies COORDSIM_LOG (trace|debug|info|warn|error|off) to the stderr logger.
void configure_logging();

}  // namespace coordsim::cli
