#pragma once

#include <iosfwd>

namespace gchol::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,       // parse, validation or I/O failure
  kBreakdown = 2,        // factorization hit a non-positive pivot
  kConditionFailed = 3,  // bound hypothesis does not hold
  kViolation = 4,        // a computed bound was exceeded
};

/// Entry point behind the gchol executable. Results go to `out` unless
/// --out is given; summaries and errors go to `err`.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace gchol::cli
