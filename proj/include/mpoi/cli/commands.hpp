#pragma once

#include <ostream>

namespace mpoi::cli {

// Exit statuses outside the library's error codes.
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 25;
inline constexpr int kExitInternal = 70;

/// Parses argv, runs one subcommand and returns the process exit status.
/// Library errors exit with their ErrorCode number.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mpoi::cli
