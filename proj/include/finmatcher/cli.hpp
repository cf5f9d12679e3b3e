#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace finmatcher::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kResource = 2,
  kNumeric = 3,
};

/// Runs one `finmatcher` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finmatcher::cli
