#pragma once

#include <iosfwd>

namespace rlct::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,  // a verification property failed, or an unexpected error
    kUsage = 2,    // bad flags, config or input
    kBudget = 3,   // enumeration budget exceeded
    kPartial = 4,  // some experiment cells failed
};

/// Entry point of rlct-lab. JSON goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rlct::cli
