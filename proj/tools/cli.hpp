#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skewjoin::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kVerificationFailure = 2,
  kNonConvergence = 3,
};

/// Entry point of the `skewjoin` tool. Documents go to `out` unless --out
/// names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skewjoin::cli
