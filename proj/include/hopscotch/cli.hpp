#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hopscotch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (serve, sim, render, metrics, sieve). `args`
/// excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hopscotch::cli
