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

#include "adaptive_ldp/results_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace adaptive_ldp {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

void CheckKeys(const json& object, std::string_view where,
               std::initializer_list<std::string_view> allowed) {
  if (!object.is_object()) Fail(std::string(where) + " must be an object");
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (std::string_view name : allowed) known = known || key == name;
    if (!known) Fail("unknown field '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void Read(const json& object, const char* key, T& out) {
  const auto it = object.find(key);
  if (it == object.end()) return;
  if constexpr (std::is_same_v<T, double>) {
    if (!it->is_number()) Fail(std::string(key) + " must be a number");
    out = it->get<double>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) Fail(std::string(key) + " must be a string");
    out = it->get<std::string>();
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!it->is_number_unsigned()) Fail(std::string(key) + " must be a non-negative integer");
    out = it->get<T>();
  } else {
    if (!it->is_number_integer()) Fail(std::string(key) + " must be an integer");
    const auto v = it->get<std::int64_t>();
    if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max()) {
      Fail(std::string(key) + " is out of range");
    }
    out = static_cast<T>(v);
  }
}

std::string_view ModeName(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::kAdaptive:
      return "adaptive";
    case SelectionKind::kSemiAdaptive:
      return "semi_adaptive";
    case SelectionKind::kNonAdaptive:
      return "non_adaptive";
  }
  return "adaptive";
}

json ConfigToJson(const ExperimentConfig& c) {
  const SgldConfig& s = c.sampler.sgld;
  return json{
      {"schema_version", kSchemaVersion},
      {"num_categories", c.num_categories},
      {"epsilon", c.epsilon},
      {"kappa", c.kappa},
      {"rho", c.rho},
      {"steps", c.steps},
      {"runs", c.runs},
      {"seed", c.seed},
      {"final_mcmc_iters", c.final_mcmc_iters},
      {"final_burnin", c.final_burnin},
      {"prior_shape", c.prior_shape},
      {"mode",
       {{"kind", ModeName(c.mode.kind)},
        {"utility", UtilityName(c.mode.utility)},
        {"alpha", c.mode.alpha}}},
      {"sampler",
       {{"kind", c.sampler.kind == SamplerKind::kSgld ? "sgld" : "gibbs"},
        {"gibbs_sweeps", c.sampler.gibbs_sweeps},
        {"sgld",
         {{"updates_per_step", s.updates_per_step},
          {"minibatch", s.minibatch},
          {"schedule", s.schedule == StepSchedule::kInverseTime ? "inverse_time" : "constant"},
          {"step_scale", s.step_scale},
          {"noise", s.noise == NoiseScale::kLiteral ? "literal" : "sqrt"}}}}},
  };
}

ExperimentConfig ConfigFromJson(const json& j) {
  CheckKeys(j, "config",
            {"schema_version", "num_categories", "epsilon", "kappa", "rho", "steps", "runs", "seed",
             "final_mcmc_iters", "final_burnin", "prior_shape", "mode", "sampler"});
  int version = kSchemaVersion;
  Read(j, "schema_version", version);
  if (version != kSchemaVersion) Fail("unsupported schema_version " + std::to_string(version));

  ExperimentConfig c;
  Read(j, "num_categories", c.num_categories);
  Read(j, "epsilon", c.epsilon);
  Read(j, "kappa", c.kappa);
  Read(j, "rho", c.rho);
  Read(j, "steps", c.steps);
  Read(j, "runs", c.runs);
  Read(j, "seed", c.seed);
  Read(j, "final_mcmc_iters", c.final_mcmc_iters);
  Read(j, "final_burnin", c.final_burnin);
  Read(j, "prior_shape", c.prior_shape);

  if (const auto it = j.find("mode"); it != j.end()) {
    CheckKeys(*it, "mode", {"kind", "utility", "alpha"});
    std::string kind(ModeName(c.mode.kind));
    std::string utility(UtilityName(c.mode.utility));
    Read(*it, "kind", kind);
    Read(*it, "utility", utility);
    Read(*it, "alpha", c.mode.alpha);
    if (kind == "adaptive") {
      c.mode.kind = SelectionKind::kAdaptive;
    } else if (kind == "semi_adaptive") {
      c.mode.kind = SelectionKind::kSemiAdaptive;
    } else if (kind == "non_adaptive") {
      c.mode.kind = SelectionKind::kNonAdaptive;
    } else {
      Fail("unknown mode.kind '" + kind + "'");
    }
    const auto parsed = ParseUtilityKind(utility);
    if (!parsed) Fail("unknown mode.utility '" + utility + "'");
    c.mode.utility = *parsed;
  }

  if (const auto it = j.find("sampler"); it != j.end()) {
    CheckKeys(*it, "sampler", {"kind", "gibbs_sweeps", "sgld"});
    std::string kind = "sgld";
    Read(*it, "kind", kind);
    if (kind == "sgld") {
      c.sampler.kind = SamplerKind::kSgld;
    } else if (kind == "gibbs") {
      c.sampler.kind = SamplerKind::kGibbs;
    } else {
      Fail("unknown sampler.kind '" + kind + "'");
    }
    Read(*it, "gibbs_sweeps", c.sampler.gibbs_sweeps);
    if (const auto sg = it->find("sgld"); sg != it->end()) {
      CheckKeys(*sg, "sampler.sgld",
                {"updates_per_step", "minibatch", "schedule", "step_scale", "noise"});
      SgldConfig& s = c.sampler.sgld;
      Read(*sg, "updates_per_step", s.updates_per_step);
      Read(*sg, "minibatch", s.minibatch);
      Read(*sg, "step_scale", s.step_scale);
      std::string schedule = s.schedule == StepSchedule::kInverseTime ? "inverse_time" : "constant";
      std::string noise = s.noise == NoiseScale::kLiteral ? "literal" : "sqrt";
      Read(*sg, "schedule", schedule);
      Read(*sg, "noise", noise);
      if (schedule == "inverse_time") {
        s.schedule = StepSchedule::kInverseTime;
      } else if (schedule == "constant") {
        s.schedule = StepSchedule::kConstant;
      } else {
        Fail("unknown sampler.sgld.schedule '" + schedule + "'");
      }
      if (noise == "literal") {
        s.noise = NoiseScale::kLiteral;
      } else if (noise == "sqrt") {
        s.noise = NoiseScale::kSqrtStep;
      } else {
        Fail("unknown sampler.sgld.noise '" + noise + "'");
      }
    }
  }
  return c;
}

json ParseJson(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(std::string("malformed JSON: ") + e.what());
  }
}

// NaN and infinities become null.
json Number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string FormatDouble(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string SerializeConfig(const ExperimentConfig& config) {
  return ConfigToJson(config).dump(2) + "\n";
}

ExperimentConfig ParseConfig(std::string_view text) { return ConfigFromJson(ParseJson(text)); }

std::vector<ExperimentConfig> ParseGridConfig(std::string_view text) {
  const json j = ParseJson(text);
  if (!j.is_object() || !j.contains("configs")) return {ConfigFromJson(j)};
  CheckKeys(j, "grid", {"schema_version", "configs"});
  int version = kSchemaVersion;
  Read(j, "schema_version", version);
  if (version != kSchemaVersion) Fail("unsupported schema_version " + std::to_string(version));
  const json& list = j.at("configs");
  if (!list.is_array() || list.empty()) Fail("configs must be a non-empty array");
  std::vector<ExperimentConfig> configs;
  for (const json& item : list) configs.push_back(ConfigFromJson(item));
  return configs;
}

std::string RunsCsv(const AggregateResult& result, bool include_wall_time) {
  std::ostringstream out;
  out << "config_id,run,status,tv_error,mean_subset_size,wall_time_s\n";
  for (const RunOutcome& run : result.runs) {
    out << result.config_index << ',' << run.run << ',' << (run.ok ? "ok" : "failed") << ',';
    if (run.ok) out << FormatDouble(run.tv_error) << ',' << FormatDouble(run.mean_subset_size);
    else out << ',';
    out << ',';
    if (include_wall_time) out << FormatDouble(run.wall_seconds);
    out << '\n';
  }
  return out.str();
}

std::string SummaryJson(const std::vector<ExperimentConfig>& configs,
                        const std::vector<AggregateResult>& results) {
  json list = json::array();
  for (const AggregateResult& r : results) {
    json failed = json::array();
    for (const RunOutcome& run : r.runs) {
      if (!run.ok) failed.push_back({{"run", run.run}, {"error", run.error}});
    }
    json entry = {
        {"config_id", r.config_index},
        {"runs", r.runs.size()},
        {"failures", r.failures},
        {"median", Number(r.median)},
        {"lower_quartile", Number(r.lower_quartile)},
        {"upper_quartile", Number(r.upper_quartile)},
        {"mean_subset_size", Number(r.mean_subset_size)},
        {"failed_runs", failed},
    };
    if (r.config_index >= 0 && r.config_index < static_cast<int>(configs.size())) {
      entry["config"] = ConfigToJson(configs[r.config_index]);
    }
    list.push_back(std::move(entry));
  }
  return json{{"schema_version", kSchemaVersion}, {"configs", list}}.dump(2) + "\n";
}

std::string TransitionMatrixCsv(const TransitionMatrix& matrix) {
  std::ostringstream out;
  const int k = matrix.num_categories();
  for (Category y = 0; y < k; ++y) {
    for (Category x = 0; x < k; ++x) {
      if (x > 0) out << ',';
      out << FormatDouble(matrix(y, x));
    }
    out << '\n';
  }
  return out.str();
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                             ec.message());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace adaptive_ldp
