#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netmod::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kNonConvergence = 2,
    kUnsupported = 3,
    kCapRefused = 4,
    kVerifyFailed = 5,
};

/// Runs one `netmod` invocation. args excludes the program name.
/// Data goes to `out` (unless --out names a file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Rounds to 12 significant digits so that serialized output is stable.
double stable(double x);

}  // namespace netmod::cli
