#pragma once

#include <string>
#include <vector>

namespace hsaw {

// Batch front end. Exit codes: 0 success, 1 usage, 2 data error, 3 runtime.
int run_cli(std::vector<std::string> args);

}  // namespace hsaw
