#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fkf::cli {

enum ExitCode { kSuccess = 0, kInternalError = 1, kUsageError = 2 };

/// Runs one `fkf` invocation. `args` excludes the program name. Reports go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1e-3,1e-5" or the decade range "1e-1..1e-14". Throws Error(invalid_input).
std::vector<double> parse_deltas(const std::string& text);

}  // namespace fkf::cli
