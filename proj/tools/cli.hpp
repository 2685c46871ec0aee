#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypflow::cli {

enum ExitCode : int
{
    exit_ok = 0,
    exit_numeric = 1,  // convergence or invariant failure
    exit_usage = 2,    // bad flags, unreadable or malformed input
};

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace hypflow::cli
