#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hkvar::cli {

enum ExitCode : int {
    kAllPass = 0,
    kCheckFailed = 1,
    kUsageError = 2,
};

/// Runs the command line in args (without the program name), writing normal
/// output to out and diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hkvar::cli
