#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ecodyn::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kValidation = 2,  // bad arguments, config, data or parameters
  kRuntime = 3,     // domain exits, integration failures, failed checks
  kIo = 4,
};

/// Runs the command line `args` (without the program name). Reports go to
/// `out`; log lines and errors go to `err`. Errors are printed as
///   ERROR <code> <kind>: <message>
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecodyn::cli
