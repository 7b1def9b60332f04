#pragma once

#include <iosfwd>

namespace airbeam::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,
  kInfeasible = 3,
  kIterationCapped = 4,
  kIoError = 5,
  kSolverError = 6,
};

/// Entry point of the `airbeam` tool: subcommands solve, bench, generate.
/// Worker count comes from AIRBEAM_THREADS (unset or 0: single-threaded).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace airbeam::cli
