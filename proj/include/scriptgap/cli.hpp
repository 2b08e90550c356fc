#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scriptgap::cli {

/// Process exit statuses.
enum ExitStatus : int {
  kSuccess = 0,
  kUsageError = 1,
  kInputError = 2,
  kValidationError = 3,
};

/// Runs one subcommand. `args` excludes the program name. Data goes to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace scriptgap::cli
