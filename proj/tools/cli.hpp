#pragma once

#include <iosfwd>

namespace perfkit::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kSelftestFailed = 3 };

// Runs one `perfkit` invocation. Results go to --out when given, otherwise
// to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace perfkit::cli
