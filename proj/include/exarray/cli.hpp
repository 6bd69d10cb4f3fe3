#ifndef EXARRAY_CLI_HPP
#define EXARRAY_CLI_HPP

#include <iosfwd>

namespace exarray::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kSchema = 2,
  kIo = 3,
  kBudget = 4,
  kInsufficientData = 5,
};

/**
 * Parses argv, runs one subcommand and writes its artifacts. A single-line
 * JSON summary (or error report) goes to `out`; diagnostics go to `err`.
 */
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exarray::cli

#endif  // EXARRAY_CLI_HPP
