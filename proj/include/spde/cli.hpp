#pragma once

#include <iosfwd>

namespace spde {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitSandwich = 3,
  kExitAudit = 4,
};

/// Entry point of the `spde` command; returns the exit code. Diagnostics go to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace spde
