#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tdgl_ring::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kToolName = "tdgl-ring";
inline constexpr const char* kToolVersion = "0.1.0";

/// Runs the command line `args` (args[0] is the program name) and returns the
/// process exit code. Subcommands: analytic, simulate, ensemble, sweep, causal,
/// materials.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdgl_ring::cli
