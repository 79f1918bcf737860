#pragma once

#include <ostream>

namespace gsosel::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kNumericalError = 2 };

/// Runs one `gsosel` command line. JSON goes to `out`; diagnostics go to
/// `err`, plus a human-readable table when `err_is_tty` is set.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            bool err_is_tty = false);

}  // namespace gsosel::cli
