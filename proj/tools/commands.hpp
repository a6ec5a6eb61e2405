#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace flatness::cli {

/// Exit codes: 0 success, 1 run finished with errors, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitErrors = 1;
inline constexpr int kExitUsage = 2;

const char* tool_version();

/// Entry point of the `flatness` command line tool.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flatness::cli
