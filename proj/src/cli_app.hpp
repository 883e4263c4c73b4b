#pragma once

#include <string>
#include <vector>

namespace atomprune::cli {

/// Entry point shared by the binary and the test suite. `args` excludes the
/// program name. Returns 0 on success, 1 on usage/config errors, 2 on
/// solver/experiment/IO errors.
int run(const std::vector<std::string>& args);

}  // namespace atomprune::cli
