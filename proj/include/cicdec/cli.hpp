// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace cicdec {

inline constexpr const char* kToolName = "cicdec";
inline constexpr const char* kToolVersion = "1.0.0";

// Exit codes, also documented in --help:
//   0  success
//   1  verification failure
//   2  design infeasible
//   64 usage error
//   65 input data format error
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailure = 1;
inline constexpr int kExitDesignInfeasible = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitDataFormat = 65;

// Runs the tool with the given arguments (excluding the program name) and
// returns the process exit code. In-process entry point used by main() and
// by the CLI tests.
int run_cli(const std::vector<std::string>& args);

} // namespace cicdec
