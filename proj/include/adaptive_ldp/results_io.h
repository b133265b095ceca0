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

// Serialization of experiment configs and results.
//
// Config JSON (schema_version 1) mirrors ExperimentConfig field for field:
//
//   {
//     "schema_version": 1,
//     "num_categories": 10, "epsilon": 1.0, "kappa": 0.9, "rho": 0.1,
//     "steps": 2000, "runs": 20, "seed": 42,
//     "final_mcmc_iters": 2000, "final_burnin": 1000, "prior_shape": 1.0,
//     "mode": {"kind": "adaptive", "utility": "honest", "alpha": 0.9},
//     "sampler": {"kind": "sgld", "gibbs_sweeps": 1,
//                 "sgld": {"updates_per_step": 20, "minibatch": 50,
//                          "schedule": "inverse_time", "step_scale": 0.5,
//                          "noise": "literal"}}
//   }
//
// Missing fields take their defaults; unknown fields are errors. mode.kind is
// one of adaptive, semi_adaptive, non_adaptive; sampler.kind is sgld or gibbs;
// schedule is inverse_time or constant; noise is literal or sqrt.
//
// A grid file is {"schema_version": 1, "configs": [<config>, ...]}.
//
// Runs CSV (one row per run):
//   config_id,run,status,tv_error,mean_subset_size,wall_time_s
// status is "ok" or "failed"; metric cells of failed runs are empty, and
// wall_time_s is empty unless wall times were requested.
//
// Summary JSON: {"schema_version": 1, "configs": [{"config_id", "config",
// "runs", "failures", "median", "lower_quartile", "upper_quartile",
// "mean_subset_size", "failed_runs": [{"run", "error"}]}]}.

#ifndef ADAPTIVE_LDP_RESULTS_IO_H_
#define ADAPTIVE_LDP_RESULTS_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "adaptive_ldp/harness.h"
#include "adaptive_ldp/mechanism.h"

namespace adaptive_ldp {

inline constexpr int kSchemaVersion = 1;

// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);

std::string SerializeConfig(const ExperimentConfig& config);
// Throws std::invalid_argument on malformed JSON, unknown fields, wrong types
// or an unsupported schema_version. The result is not validated.
ExperimentConfig ParseConfig(std::string_view json);

// Accepts a grid file or a single config object.
std::vector<ExperimentConfig> ParseGridConfig(std::string_view json);

std::string RunsCsv(const AggregateResult& result, bool include_wall_time);
std::string SummaryJson(const std::vector<ExperimentConfig>& configs,
                        const std::vector<AggregateResult>& results);

// Rows are y, columns x.
std::string TransitionMatrixCsv(const TransitionMatrix& matrix);

// Writes to a temporary file in the same directory, then renames it over
// `path`. Throws std::runtime_error if either step fails.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

// Throws std::runtime_error if the file cannot be read.
std::string ReadFile(const std::filesystem::path& path);

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_RESULTS_IO_H_
