#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hbl::cli {

enum ExitCode { kHolds = 0, kParseError = 1, kFails = 2, kInconclusive = 3 };

// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hbl::cli
