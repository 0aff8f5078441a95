#pragma once

#include <string>
#include <vector>

namespace gaitforge::cli {

// Exit codes: 0 success, 2 usage/config error, 3 runtime failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace gaitforge::cli
