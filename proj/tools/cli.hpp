#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pnsat::cli {

inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kCapExceeded = 2;
inline constexpr int kVerifyFailed = 3;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pnsat::cli
