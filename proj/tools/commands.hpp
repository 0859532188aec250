#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lierec::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericalFailure = 3,
};

/**
 * @brief Runs one `lierec` invocation.
 *
 * `args` excludes the program name. Normal output goes to `out`; diagnostics
 * are written to `err` as a single line. Returns the process exit code.
 */
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace lierec::cli
