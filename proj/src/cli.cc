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

#include "adaptive_ldp/cli.h"

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "adaptive_ldp/mechanism.h"
#include "adaptive_ldp/results_io.h"
#include "adaptive_ldp/validation.h"

namespace adaptive_ldp {
namespace {

int DefaultThreads() {
  const char* value = std::getenv(kThreadsEnvVar);
  if (value == nullptr || *value == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw UsageError(std::string(kThreadsEnvVar) + " must be a positive integer");
  }
  return static_cast<int>(n);
}

void AddThreadsOption(CLI::App* app, CliInvocation& inv) {
  app->add_option("--threads", inv.threads, "worker threads (default from " +
                                                std::string(kThreadsEnvVar) + ", else 1)");
}

// Experiment flags are parsed into `flags`; only those given on the command
// line are copied over the base config (defaults or --config file).
struct ConfigFlags {
  ExperimentConfig flags;
  std::string mode = "adaptive";
  std::string utility = "honest";
  std::string sampler = "sgld";
  std::string schedule = "inverse_time";
  std::string noise = "literal";
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> overrides;

  template <typename T>
  void Add(CLI::App* app, const std::string& name, T& field, T ExperimentConfig::*member,
           const std::string& help) {
    CLI::Option* opt = app->add_option(name, field, help);
    overrides.emplace_back(opt, [&field, member](ExperimentConfig& c) { c.*member = field; });
  }

  template <typename T>
  void AddWith(CLI::App* app, const std::string& name, T& field,
               std::function<void(ExperimentConfig&)> apply, const std::string& help) {
    overrides.emplace_back(app->add_option(name, field, help), std::move(apply));
  }

  void Register(CLI::App* app) {
    ExperimentConfig& f = flags;
    Add(app, "--k", f.num_categories, &ExperimentConfig::num_categories, "number of categories K");
    Add(app, "--epsilon", f.epsilon, &ExperimentConfig::epsilon, "privacy parameter");
    Add(app, "--kappa", f.kappa, &ExperimentConfig::kappa, "budget split eps1 = kappa * eps");
    Add(app, "--rho", f.rho, &ExperimentConfig::rho, "Dirichlet concentration of theta*");
    Add(app, "--steps", f.steps, &ExperimentConfig::steps, "time steps T");
    Add(app, "--runs", f.runs, &ExperimentConfig::runs, "Monte Carlo runs");
    Add(app, "--seed", f.seed, &ExperimentConfig::seed, "master seed");
    Add(app, "--final-iters", f.final_mcmc_iters, &ExperimentConfig::final_mcmc_iters,
        "sampler iterations after the last step");
    Add(app, "--final-burnin", f.final_burnin, &ExperimentConfig::final_burnin,
        "final iterations discarded before averaging");
    Add(app, "--prior-shape", f.prior_shape, &ExperimentConfig::prior_shape,
        "symmetric Dirichlet prior shape");
    AddWith(app, "--mode", mode, [this](ExperimentConfig& c) { c.mode.kind = ModeKind(); },
            "adaptive | semi_adaptive | non_adaptive");
    AddWith(app, "--utility", utility,
            [this](ExperimentConfig& c) { c.mode.utility = *ParseUtilityKind(utility); },
            "fisher | entropy | tv-posterior | tv-marginal | mse | honest");
    AddWith(app, "--alpha", f.mode.alpha,
            [this](ExperimentConfig& c) { c.mode.alpha = flags.mode.alpha; },
            "semi-adaptive mass threshold");
    AddWith(app, "--sampler", sampler,
            [this](ExperimentConfig& c) {
              c.sampler.kind = sampler == "gibbs" ? SamplerKind::kGibbs : SamplerKind::kSgld;
            },
            "sgld | gibbs");
    AddWith(app, "--updates-per-step", f.sampler.sgld.updates_per_step,
            [this](ExperimentConfig& c) {
              c.sampler.sgld.updates_per_step = flags.sampler.sgld.updates_per_step;
            },
            "SGLD updates per step M");
    AddWith(app, "--minibatch", f.sampler.sgld.minibatch,
            [this](ExperimentConfig& c) { c.sampler.sgld.minibatch = flags.sampler.sgld.minibatch; },
            "SGLD subsample size m");
    AddWith(app, "--step-scale", f.sampler.sgld.step_scale,
            [this](ExperimentConfig& c) {
              c.sampler.sgld.step_scale = flags.sampler.sgld.step_scale;
            },
            "SGLD step scale a (gamma_t = a / t)");
    AddWith(app, "--schedule", schedule,
            [this](ExperimentConfig& c) {
              c.sampler.sgld.schedule = schedule == "constant" ? StepSchedule::kConstant
                                                               : StepSchedule::kInverseTime;
            },
            "inverse_time | constant");
    AddWith(app, "--noise", noise,
            [this](ExperimentConfig& c) {
              c.sampler.sgld.noise =
                  noise == "sqrt" ? NoiseScale::kSqrtStep : NoiseScale::kLiteral;
            },
            "literal (sd gamma) | sqrt (sd sqrt(gamma))");
    AddWith(app, "--gibbs-sweeps", f.sampler.gibbs_sweeps,
            [this](ExperimentConfig& c) { c.sampler.gibbs_sweeps = flags.sampler.gibbs_sweeps; },
            "Gibbs sweeps per step");
  }

  SelectionKind ModeKind() const {
    if (mode == "semi_adaptive") return SelectionKind::kSemiAdaptive;
    if (mode == "non_adaptive") return SelectionKind::kNonAdaptive;
    return SelectionKind::kAdaptive;
  }

  void CheckChoices() const {
    const auto check = [](const std::string& flag, const std::string& value,
                          std::initializer_list<const char*> allowed) {
      for (const char* a : allowed) {
        if (value == a) return;
      }
      throw UsageError(flag + ": unknown value '" + value + "'");
    };
    check("--mode", mode, {"adaptive", "semi_adaptive", "non_adaptive"});
    check("--utility", utility,
          {"fisher", "entropy", "tv-posterior", "tv-marginal", "mse", "honest"});
    check("--sampler", sampler, {"sgld", "gibbs"});
    check("--schedule", schedule, {"inverse_time", "constant"});
    check("--noise", noise, {"literal", "sqrt"});
  }

  ExperimentConfig Resolve(ExperimentConfig base) const {
    for (const auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(base);
    }
    return base;
  }
};

void Validate(const ExperimentConfig& config) {
  try {
    config.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string SummaryLine(const AggregateResult& r) {
  std::ostringstream line;
  line << "median_tv=" << FormatDouble(r.median) << " q1=" << FormatDouble(r.lower_quartile)
       << " q3=" << FormatDouble(r.upper_quartile)
       << " mean_subset_size=" << FormatDouble(r.mean_subset_size) << " runs=" << r.runs.size()
       << " failures=" << r.failures;
  return line.str();
}

void ReportFailures(const AggregateResult& r, std::ostream& err) {
  for (const RunOutcome& run : r.runs) {
    if (!run.ok) err << "config " << r.config_index << " run " << run.run << " failed: "
                     << run.error << "\n";
  }
}

// Re-runs replicate 0 of `config` with observers attached; the stream and
// ground truth are those RunGrid uses, so the run is identical.
void WriteTraces(const CliInvocation& inv) {
  const ExperimentConfig& config = inv.config;
  const int k = config.num_categories;
  std::ostringstream steps;
  std::ostringstream chain;
  steps << "t,k,response";
  for (int i = 0; i < k; ++i) steps << ",u_" << i;
  for (int i = 0; i < k; ++i) steps << ",theta_" << i;
  steps << '\n';
  chain << "iter";
  for (int i = 0; i < k; ++i) chain << ",theta_" << i;
  chain << '\n';

  RunOptions options;
  if (inv.step_trace) {
    options.on_step = [&](const StepRecord& r) {
      steps << r.t << ',' << r.choice->k_star << ',' << r.response;
      for (int i = 0; i < k; ++i) {
        steps << ',';
        if (i < static_cast<int>(r.choice->utility_values.size())) {
          steps << FormatDouble(r.choice->utility_values[i]);
        }
      }
      for (double v : *r.theta) steps << ',' << FormatDouble(v);
      steps << '\n';
    };
  }
  if (inv.chain_trace) {
    options.on_final_iterate = [&](int iter, const ProbVector& theta) {
      chain << iter;
      for (double v : theta) chain << ',' << FormatDouble(v);
      chain << '\n';
    };
  }
  Rng rng = ChildStream(config.seed, 0, 0);
  const ProbVector truth = DrawGroundTruth(config, rng);
  RunAdaptiveLoop(config, truth, rng, options);
  if (inv.step_trace) WriteFileAtomic(*inv.step_trace, steps.str());
  if (inv.chain_trace) WriteFileAtomic(*inv.chain_trace, chain.str());
}

int RunSimulate(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.dump_config) {
    out << SerializeConfig(inv.config);
    return kExitOk;
  }
  const std::vector<AggregateResult> results = RunGrid({inv.config}, {inv.threads});
  const AggregateResult& r = results.front();
  if (inv.out) WriteFileAtomic(*inv.out, RunsCsv(r, inv.wall_time));
  if (inv.summary) WriteFileAtomic(*inv.summary, SummaryJson({inv.config}, results));
  if (inv.step_trace || inv.chain_trace) WriteTraces(inv);
  ReportFailures(r, err);
  out << SummaryLine(r) << "\n";
  return r.failures == static_cast<int>(r.runs.size()) ? kExitError : kExitOk;
}

int RunGridCommand(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  const std::vector<ExperimentConfig> configs = ParseGridConfig(ReadFile(*inv.config_file));
  for (std::size_t i = 0; i < configs.size(); ++i) {
    try {
      configs[i].Validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config " + std::to_string(i) + ": " + e.what());
    }
  }
  const std::filesystem::path dir = *inv.out;
  std::filesystem::create_directories(dir);
  const std::vector<AggregateResult> results = RunGrid(configs, {inv.threads});
  int failures = 0;
  for (const AggregateResult& r : results) {
    char name[32];
    std::snprintf(name, sizeof(name), "config_%03d.csv", r.config_index);
    WriteFileAtomic(dir / name, RunsCsv(r, inv.wall_time));
    ReportFailures(r, err);
    failures += r.failures;
  }
  WriteFileAtomic(dir / "summary.json", SummaryJson(configs, results));
  for (const AggregateResult& r : results) {
    out << "config " << r.config_index << ": " << SummaryLine(r) << "\n";
  }
  out << "wrote " << results.size() << " config(s) to " << dir.string()
      << ", failures=" << failures << "\n";
  return kExitOk;
}

int RunInspect(const CliInvocation& inv, std::ostream& out) {
  const MechanismSpec spec(SubsetSpec(inv.num_categories, inv.subset), inv.epsilon, inv.kappa);
  const TransitionMatrix matrix = BuildTransitionMatrix(spec);
  const LdpReport report = VerifyLdp(matrix, inv.epsilon);
  const std::string csv = TransitionMatrixCsv(matrix);
  std::ostringstream line;
  line << "certified=" << (report.certified ? "true" : "false")
       << " max_log_ratio=" << FormatDouble(report.max_log_ratio)
       << " epsilon=" << FormatDouble(inv.epsilon)
       << " epsilon1=" << FormatDouble(spec.budget().epsilon1())
       << " epsilon2=" << FormatDouble(spec.budget().epsilon2()) << " worst_y=" << report.worst_y
       << " worst_x=" << report.worst_x << " worst_x_prime=" << report.worst_x_prime;
  if (inv.out) {
    WriteFileAtomic(*inv.out, csv);
    out << line.str() << "\n";
  } else {
    out << csv << "# " << line.str() << "\n";
  }
  return report.certified ? kExitOk : kExitValidationFailed;
}

int RunFig2(const CliInvocation& inv, std::ostream& out) {
  const std::vector<HonestCurveRow> rows =
      HonestResponseCurves(inv.num_categories, inv.epsilon, inv.kappa, inv.ratios);
  std::ostringstream csv;
  csv << "ratio,k,u6,srr_baseline\n";
  for (const HonestCurveRow& row : rows) {
    csv << FormatDouble(row.ratio) << ',' << row.k << ',' << FormatDouble(row.honest_probability)
        << ',' << FormatDouble(row.srr_baseline) << '\n';
  }
  if (!inv.out) {
    out << csv.str();
    return kExitOk;
  }
  WriteFileAtomic(*inv.out, csv.str());
  std::ostringstream line;
  line << "srr_baseline=" << FormatDouble(rows.front().srr_baseline) << " best_k:";
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t best = i;
    std::size_t j = i;
    for (; j < rows.size() && rows[j].ratio == rows[i].ratio; ++j) {
      if (rows[j].honest_probability > rows[best].honest_probability) best = j;
    }
    line << ' ' << FormatDouble(rows[i].ratio) << "->" << rows[best].k;
    i = j;
  }
  out << line.str() << "\n";
  return kExitOk;
}

int RunValidate(const CliInvocation& inv, std::ostream& out) {
  const std::vector<CheckResult> checks = RunValidationSuite(inv.seed);
  int passed = 0;
  for (const CheckResult& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    passed += c.passed ? 1 : 0;
  }
  out << "validate: " << passed << "/" << checks.size() << " checks passed\n";
  return passed == static_cast<int>(checks.size()) ? kExitOk : kExitValidationFailed;
}

}  // namespace

std::optional<CliInvocation> ParseArgs(const std::vector<std::string>& args, std::ostream& out) {
  CliInvocation inv;
  inv.threads = DefaultThreads();

  CLI::App app{"Adaptive Bayesian categorical estimation under local differential privacy"};
  app.name(args.empty() ? "adaptive_ldp" : args.front());
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string config_path;
  std::string out_path;
  std::string summary_path;
  std::string step_trace_path;
  std::string chain_trace_path;
  int subset_size = 0;

  CLI::App* sim = app.add_subcommand("simulate", "run one experiment config");
  flags.Register(sim);
  sim->add_option("--config", config_path, "JSON config; flags given explicitly override it");
  sim->add_option("--out", out_path, "runs CSV");
  sim->add_option("--summary", summary_path, "summary JSON");
  sim->add_option("--step-trace", step_trace_path,
                  "per-step CSV for run 0: chosen k, response, utilities, theta");
  sim->add_option("--chain-trace", chain_trace_path,
                  "CSV of the final sampler iterates of run 0");
  sim->add_flag("--dump-config", inv.dump_config, "print the resolved config JSON and exit");
  sim->add_flag("--wall-time", inv.wall_time, "fill the wall_time_s column");
  AddThreadsOption(sim, inv);

  CLI::App* grid = app.add_subcommand("grid", "run every config in a grid file");
  grid->add_option("--config", config_path, "grid JSON")->required();
  grid->add_option("--out", out_path, "output directory")->required();
  grid->add_flag("--wall-time", inv.wall_time, "fill the wall_time_s column");
  AddThreadsOption(grid, inv);

  CLI::App* inspect =
      app.add_subcommand("inspect-mechanism", "print a transition matrix and its LDP audit");
  inspect->add_option("--k", inv.num_categories, "number of categories")->required();
  inspect->add_option("--epsilon", inv.epsilon, "privacy parameter")->required();
  inspect->add_option("--kappa", inv.kappa, "budget split");
  CLI::Option* size_opt =
      inspect->add_option("--subset-size", subset_size, "S = {0, ..., size-1}");
  CLI::Option* subset_opt = inspect->add_option("--subset", inv.subset,
                                                "explicit 0-based members, comma separated")
                                ->delimiter(',');
  size_opt->excludes(subset_opt);
  inspect->add_option("--out", out_path, "matrix CSV (rows y, columns x); stdout if omitted");

  CLI::App* fig2 = app.add_subcommand("fig2", "honest-response curves on geometric thetas");
  fig2->add_option("--k", inv.num_categories, "number of categories")->required();
  fig2->add_option("--epsilon", inv.epsilon, "privacy parameter")->required();
  fig2->add_option("--kappa", inv.kappa, "budget split");
  inv.ratios = {1.1, 1.5, 2.0, 3.0};
  fig2->add_option("--ratios", inv.ratios, "theta_i / theta_{i+1}, comma separated")
      ->delimiter(',');
  fig2->add_option("--out", out_path, "CSV path; stdout if omitted");

  CLI::App* validate = app.add_subcommand("validate", "run the built-in property checks");
  validate->add_option("--seed", inv.seed, "seed for the randomized checks");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("adaptive_ldp");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    if (what.empty()) what = e.get_name();
    throw UsageError(what);
  }

  if (!out_path.empty()) inv.out = out_path;
  if (inv.threads < 1) throw UsageError("--threads must be >= 1");

  if (sim->parsed()) {
    inv.subcommand = Subcommand::kSimulate;
    flags.CheckChoices();
    ExperimentConfig base;
    if (!config_path.empty()) {
      inv.config_file = config_path;
      try {
        base = ParseConfig(ReadFile(config_path));
      } catch (const std::exception& e) {
        throw UsageError("--config: " + std::string(e.what()));
      }
    }
    inv.config = flags.Resolve(base);
    Validate(inv.config);
    if (!summary_path.empty()) inv.summary = summary_path;
    if (!step_trace_path.empty()) inv.step_trace = step_trace_path;
    if (!chain_trace_path.empty()) inv.chain_trace = chain_trace_path;
  } else if (grid->parsed()) {
    inv.subcommand = Subcommand::kGrid;
    inv.config_file = config_path;
  } else if (inspect->parsed() || fig2->parsed()) {
    inv.subcommand = inspect->parsed() ? Subcommand::kInspectMechanism : Subcommand::kFig2;
    if (inv.num_categories < 2) throw UsageError("k must be >= 2");
    if (!(inv.epsilon > 0.0 && inv.epsilon <= kMaxEpsilon)) {
      throw UsageError("epsilon must be in (0, 700]");
    }
    if (!(inv.kappa > 0.0 && inv.kappa < 1.0)) throw UsageError("kappa must be in (0,1)");
    if (inspect->parsed()) {
      if (subset_opt->count() == 0) {
        if (subset_size < 0 || subset_size >= inv.num_categories) {
          throw UsageError("subset-size must be in [0, k-1]");
        }
        inv.subset.resize(subset_size);
        std::iota(inv.subset.begin(), inv.subset.end(), 0);
      }
      try {
        SubsetSpec(inv.num_categories, inv.subset);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--subset: ") + e.what());
      }
    } else {
      for (double r : inv.ratios) {
        if (!(r > 1.0) || !std::isfinite(r)) throw UsageError("ratios must be > 1");
      }
      if (inv.ratios.empty()) throw UsageError("--ratios must not be empty");
    }
  } else {
    inv.subcommand = Subcommand::kValidate;
  }
  return inv;
}

int RunCli(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  switch (inv.subcommand) {
    case Subcommand::kSimulate:
      return RunSimulate(inv, out, err);
    case Subcommand::kGrid:
      return RunGridCommand(inv, out, err);
    case Subcommand::kInspectMechanism:
      return RunInspect(inv, out);
    case Subcommand::kFig2:
      return RunFig2(inv, out);
    case Subcommand::kValidate:
      return RunValidate(inv, out);
  }
  return kExitError;
}

int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const std::optional<CliInvocation> inv = ParseArgs(args, out);
    if (!inv) return kExitOk;
    return RunCli(*inv, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace adaptive_ldp
