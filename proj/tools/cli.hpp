#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ocpg::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidGraph = 2,
  kInputError = 3,
  kBudgetExceeded = 4,
};

/// Runs one command line (without the program name). Artifacts go to `out`
/// unless --out names a file; summaries and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ocpg::cli
