#pragma once

#include <string>
#include <vector>

namespace fragrec {

/// Command-line entry point. `args` excludes the program name.
/// Returns 0 on success, 1 on usage errors, 2 on data-format errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace fragrec
