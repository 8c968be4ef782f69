#pragma once

#include <iostream>

namespace biknn {

/// Entry point of the `biknn` command line tool. Returns 0 on success, 1 on a
/// usage or parameter error and 2 on a data error.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace biknn
