#pragma once
// Command-line front end. `run_cli` is the whole program minus process exit,
// so tests can drive it in-process.
//
// Exit codes:
//   0  success (also --help / --version)
//   1  parse, validation, regression or usage error
//   2  sizing did not converge, diverged, or the weight decomposition is
//      infeasible
//   3  the aircraft cannot fly the mission (stall, fuel or battery exhausted)

#include <ostream>
#include <string_view>

namespace fastsize {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitSizing = 2,
  kExitMission = 3,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fastsize
