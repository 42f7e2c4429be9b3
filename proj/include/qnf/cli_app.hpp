#pragma once

#include <string>
#include <vector>

namespace qnf {

// Full command-line driver (arguments exclude the program name).
// Exit codes: 0 success, 2 input error, 3 numeric singularity or an
// undecidable stability verdict, 4 infeasible optimization seed.
int run_cli(const std::vector<std::string>& args);

} // namespace qnf
