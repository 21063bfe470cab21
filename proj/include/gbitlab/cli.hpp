#pragma once

#include <string>
#include <vector>

namespace gbitlab {

/// Runs one CLI invocation (argv without the program name); returns the
/// process exit code: 0 success, 1 error, 2 budget exhaustion.
int run_cli(const std::vector<std::string>& args);

}  // namespace gbitlab
