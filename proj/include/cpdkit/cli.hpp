#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpdkit::cli {

// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,        // positive verdict, member, or completed run
  kNegative = 1,       // NOT_POSITIVE / NON_MEMBER
  kUnknown = 2,        // heuristic inconclusive
  kUsage = 64,
  kInvalidInput = 65,
  kInternal = 70,
};

// Runs one command line (args[0] is the program name). The JSON document
// goes to --out when given (summary line to `out`), otherwise to `out`
// with the summary on `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpdkit::cli
