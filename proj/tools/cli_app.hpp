#pragma once

#include <string>
#include <vector>

namespace maxreg::cli {

/// Full command line run. Returns 0 on success, 2 on validation errors and usage errors,
/// 1 on numerical failure (including NaN in the final report).
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace maxreg::cli
