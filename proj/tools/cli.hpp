#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gpa::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInput = 2,
  kSafety = 3,  // an oracle found a flow the constructive labels missed
};

/// Runs the `gpa` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gpa::cli
