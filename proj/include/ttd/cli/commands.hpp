#pragma once

#include <ostream>

namespace ttd::cli {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

// Entry point of the `ttd` tool. Output goes to `out` and `err` only, so the
// tool can be driven in-process by tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ttd::cli
