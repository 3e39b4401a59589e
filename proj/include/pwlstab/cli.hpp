#pragma once

#include <iosfwd>

namespace pwlstab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. Exit codes: 0 success, 2 usage, regime or
/// precondition errors, 1 I/O and other runtime failures.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pwlstab::cli
