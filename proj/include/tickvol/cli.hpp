#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tickvol {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_validation_failed = 1, exit_input_error = 2 };

/// Runs the command line tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tickvol
