#pragma once

#include <ostream>

namespace saddle::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,        // parse, config or domain error
    kNotFixedPoint = 3,
    kIo = 4,
};

/// Runs one command line. Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace saddle::cli
