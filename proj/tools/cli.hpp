#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace astref::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kData = 3, kInternal = 4 };

/// Runs one `astref` invocation. `args` excludes the program name. Data goes
/// to `out`, diagnostics to `err`; "-" or an absent --in reads `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace astref::cli
