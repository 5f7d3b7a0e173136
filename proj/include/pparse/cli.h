#pragma once

#include <string>
#include <vector>

namespace pparse::cli {

// Runs one CLI invocation (args excludes the program name).
// Exit codes: 0 success, 1 usage error, 2 data error, 3 training failure.
int run(std::vector<std::string> args);

}  // namespace pparse::cli
