#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hurstlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one `hurstlab` invocation. `args` excludes the program name.
/// Results go to `out` (or the --out file), diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                std::ostream& err);

}  // namespace hurstlab::cli
