// Copyright 2026 The Adaptive LDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end.
//
//   simulate           run one experiment config, write a runs CSV
//   grid               run every config of a grid file, one CSV per config
//   inspect-mechanism  print a transition matrix and its LDP audit
//   fig2               honest-response probability curves on geometric thetas
//   validate           built-in property checks
//
// Exit codes: 0 success, 1 usage or runtime error, 2 a validate check failed.

#ifndef ADAPTIVE_LDP_CLI_H_
#define ADAPTIVE_LDP_CLI_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaptive_ldp/harness.h"

namespace adaptive_ldp {

// Environment variable holding the default for --threads.
inline constexpr const char* kThreadsEnvVar = "ADAPTIVE_LDP_THREADS";

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitValidationFailed = 2;

enum class Subcommand { kSimulate, kGrid, kInspectMechanism, kFig2, kValidate };

struct CliInvocation {
  Subcommand subcommand = Subcommand::kSimulate;

  // simulate
  ExperimentConfig config;
  bool dump_config = false;
  std::optional<std::filesystem::path> summary;
  std::optional<std::filesystem::path> step_trace;
  std::optional<std::filesystem::path> chain_trace;

  // grid
  std::optional<std::filesystem::path> config_file;

  // simulate, grid, inspect-mechanism, fig2
  std::optional<std::filesystem::path> out;
  int threads = 1;
  bool wall_time = false;

  // inspect-mechanism, fig2
  int num_categories = 20;
  double epsilon = 1.0;
  double kappa = 0.9;
  std::vector<Category> subset;
  std::vector<double> ratios;

  // validate
  std::uint64_t seed = 1;
};

// A malformed command line; what() names the offending flag or value.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses and range-checks arguments (argv[0] is the program name). Reads
// --config files for simulate. Returns std::nullopt after printing help to
// `out` when --help was requested; throws UsageError otherwise.
std::optional<CliInvocation> ParseArgs(const std::vector<std::string>& args, std::ostream& out);

// Executes a parsed invocation; prints a one-line summary to `out` and
// diagnostics to `err`.
int RunCli(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

// ParseArgs followed by RunCli, mapping errors to exit codes.
int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_CLI_H_
