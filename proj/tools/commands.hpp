#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaosres::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_error = 1,
    exit_usage = 2,
    exit_parse = 3,
    exit_guard = 4,
    exit_verify_failed = 5,
};

/// Runs the command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaosres::cli
