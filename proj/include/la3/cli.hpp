#pragma once

#include <istream>
#include <ostream>

namespace la3::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitExternal = 3;

/// Entry point of the `la3` tool. Machine output goes to `out` (or --out),
/// diagnostics to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace la3::cli
