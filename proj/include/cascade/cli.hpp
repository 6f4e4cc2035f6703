#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascade::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kMalformedInput = 2,
  kInvalidRequest = 3,
  kBudgetExceeded = 4,
};

/// Runs the command line `args` (program name excluded). Standard input is
/// read from `in` when the input path is `-`. Returns the exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace cascade::cli
