#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace acnkit::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;      // contract, constraint or codec failure
inline constexpr int kUsage = 2;        // bad arguments or unreadable files
inline constexpr int kDiagnostics = 3;  // parse or compile diagnostics

// Runs one command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace acnkit::cli
