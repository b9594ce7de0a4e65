#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seedshift {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCorruptInput = 3;
inline constexpr int kExitNumerical = 4;

/// Runs the command-line frontend; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace seedshift
