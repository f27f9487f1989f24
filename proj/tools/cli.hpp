#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcomp::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kDiagnostics = 1;  // bad input, diagnostics, unknown ids
inline constexpr int kCompositionFailed = 2;

/// Runs one `mcomp` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcomp::cli
