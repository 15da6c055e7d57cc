#pragma once

#include <iosfwd>

namespace pcboost::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDataOrModel = 2,
    kStrictFailure = 3,
};

/// Runs one command line. Normal output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pcboost::cli
