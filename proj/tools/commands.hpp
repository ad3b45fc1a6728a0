#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cli {

enum ExitCode { kPass = 0, kCriterionFailed = 1, kInputError = 2 };

// Parses the arguments (program name excluded), runs the subcommand, writes the JSON report (or a
// structured error object) to out and a human summary to err. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
