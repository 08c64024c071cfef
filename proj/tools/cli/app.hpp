#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cli {

enum ExitCode { kOk = 0, kInternalError = 1, kConfigError = 2, kNumericalError = 3 };

/// Full command line (without the program name); returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
