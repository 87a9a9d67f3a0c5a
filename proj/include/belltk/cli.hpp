#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace belltk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNoConvergence = 4;

// Runs one command line (without the program name). Never throws; failures
// are reported on `err` and through the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace belltk::cli
