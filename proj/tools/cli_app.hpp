#pragma once

#include <string>
#include <vector>

namespace soilspec {

// Full command-line front end; args exclude the program name. Returns the
// process exit code (0 ok, 1 user/data error, 2 internal error) and never
// calls exit(), so tests can drive it in-process.
int run_cli(const std::vector<std::string>& args);

}  // namespace soilspec
