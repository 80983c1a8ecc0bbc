/**
 * @file cli.hpp
 * @brief `ehrgate` operator commands
 *
 * Exit codes: 0 success, 1 parse or validation error, 2 I/O error,
 * 3 target unreachable, 4 simulation found breaches.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ehrgate::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 1,
    exit_io = 2,
    exit_unreachable = 3,
    exit_breach = 4,
};

/// @p args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ehrgate::cli
