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

#include "adaptive_ldp/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "adaptive_ldp/mechanism.h"

namespace adaptive_ldp {
namespace {

// One step in a hundred is audited unless RunOptions asks for all of them.
constexpr int kAuditStride = 100;

void Require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

SubsetChoice ChooseSubset(const ExperimentConfig& config, const ProbVector& theta) {
  switch (config.mode.kind) {
    case SelectionKind::kAdaptive:
      return SelectSubset(theta, config.epsilon, config.kappa, config.mode.utility);
    case SelectionKind::kSemiAdaptive:
      return SelectSubsetSemiAdaptive(theta, config.mode.alpha);
    case SelectionKind::kNonAdaptive:
      break;
  }
  return SubsetChoice{0, SubsetSpec::Empty(theta.size()), {}, false};
}

// The posterior sampler behind a common interface: advance by one outer step,
// run one extra iteration, expose the current draw and state.
class Sampler {
 public:
  Sampler(const ExperimentConfig& config, const DirichletParams& prior)
      : config_(config),
        prior_(prior),
        sgld_state_(GammaState::AtPriorMean(prior)),
        gibbs_state_{{}, PhiToTheta(GammaState::AtPriorMean(prior))},
        theta_(gibbs_state_.theta) {}

  const ProbVector& theta() const { return theta_; }

  std::vector<double> StateVector() const {
    return config_.sampler.kind == SamplerKind::kSgld ? sgld_state_.phi()
                                                      : gibbs_state_.theta.vector();
  }

  void Step(const History& history, int t, Rng& rng) {
    if (config_.sampler.kind == SamplerKind::kSgld) {
      SgldDraw draw = SgldSample(history, config_.sampler.sgld, sgld_state_, t, rng);
      sgld_state_ = std::move(draw.state);
      theta_ = std::move(draw.theta);
    } else {
      for (int s = 0; s < config_.sampler.gibbs_sweeps; ++s) Iterate(history, t, rng);
    }
  }

  void Iterate(const History& history, int t, Rng& rng) {
    if (config_.sampler.kind == SamplerKind::kSgld) {
      sgld_state_ = SgldUpdate(sgld_state_, history, config_.sampler.sgld, t, rng);
      theta_ = PhiToTheta(sgld_state_);
    } else {
      gibbs_state_ = GibbsSweep(gibbs_state_, history, prior_, rng);
      theta_ = gibbs_state_.theta;
    }
  }

 private:
  const ExperimentConfig& config_;
  DirichletParams prior_;
  GammaState sgld_state_;
  GibbsState gibbs_state_;
  ProbVector theta_;
};

}  // namespace

void ExperimentConfig::Validate() const {
  Require(num_categories >= 2, "num_categories must be >= 2");
  Require(epsilon > 0.0 && epsilon <= kMaxEpsilon, "epsilon must be in (0, 700]");
  Require(kappa > 0.0 && kappa < 1.0, "kappa must be in (0,1)");
  Require(rho > 0.0 && std::isfinite(rho), "rho must be > 0");
  Require(steps >= 1, "steps must be >= 1");
  Require(runs >= 1, "runs must be >= 1");
  Require(final_mcmc_iters >= 1, "final_mcmc_iters must be >= 1");
  Require(final_burnin >= 0 && final_burnin < final_mcmc_iters,
          "final_burnin must be in [0, final_mcmc_iters)");
  Require(prior_shape > 0.0 && std::isfinite(prior_shape), "prior_shape must be > 0");
  if (mode.kind == SelectionKind::kSemiAdaptive) {
    Require(mode.alpha > 0.0 && mode.alpha < 1.0, "alpha must be in (0,1)");
  }
  if (sampler.kind == SamplerKind::kSgld) {
    sampler.sgld.Validate();
  } else {
    Require(sampler.gibbs_sweeps >= 1, "gibbs_sweeps must be >= 1");
  }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto sampler_eq = [](const SamplerConfig& x, const SamplerConfig& y) {
    return x.kind == y.kind && x.gibbs_sweeps == y.gibbs_sweeps &&
           x.sgld.updates_per_step == y.sgld.updates_per_step &&
           x.sgld.minibatch == y.sgld.minibatch && x.sgld.schedule == y.sgld.schedule &&
           x.sgld.step_scale == y.sgld.step_scale && x.sgld.noise == y.sgld.noise;
  };
  return a.num_categories == b.num_categories && a.epsilon == b.epsilon && a.kappa == b.kappa &&
         a.rho == b.rho && a.steps == b.steps && a.mode == b.mode &&
         sampler_eq(a.sampler, b.sampler) && a.runs == b.runs && a.seed == b.seed &&
         a.final_mcmc_iters == b.final_mcmc_iters && a.final_burnin == b.final_burnin &&
         a.prior_shape == b.prior_shape;
}

RunTrace RunAdaptiveLoop(const ExperimentConfig& config, const ProbVector& theta_star, Rng& rng,
                         const RunOptions& options) {
  config.Validate();
  const int k = config.num_categories;
  Require(theta_star.size() == k, "ground truth has the wrong number of categories");

  const DirichletParams prior = DirichletParams::Symmetric(k, config.prior_shape);
  Sampler sampler(config, prior);
  History history(k);
  RunTrace trace;
  trace.ground_truth = theta_star;
  trace.subset_sizes.reserve(config.steps);

  for (int t = 1; t <= config.steps; ++t) {
    const SubsetChoice choice = ChooseSubset(config, sampler.theta());
    if (choice.fell_back) ++trace.fallback_steps;
    const MechanismSpec mechanism(choice.subset, config.epsilon, config.kappa);
    if (options.audit_all_steps || (t - 1) % kAuditStride == 0) {
      const LdpReport report = VerifyLdp(BuildTransitionMatrix(mechanism), config.epsilon);
      if (!report.certified) {
        throw std::logic_error("mechanism at step " + std::to_string(t) +
                               " violates epsilon-LDP: log-ratio " +
                               std::to_string(report.max_log_ratio));
      }
      ++trace.audited_steps;
    }

    const Category x = SampleCategorical(theta_star, rng);
    const Category y = Randomize(mechanism, x, rng);
    history.Append(y, mechanism);
    trace.subset_sizes.push_back(choice.k_star);

    if (options.on_step) {
      StepRecord record;
      record.t = t;
      record.truth = x;
      record.response = y;
      record.choice = &choice;
      record.mechanism = &mechanism;
      record.state_in = sampler.StateVector();
      sampler.Step(history, t, rng);
      record.state_out = sampler.StateVector();
      record.theta = &sampler.theta();
      options.on_step(record);
    } else {
      sampler.Step(history, t, rng);
    }
  }

  std::vector<double> sum(k, 0.0);
  int averaged = 0;
  for (int j = 0; j < config.final_mcmc_iters; ++j) {
    sampler.Iterate(history, config.steps, rng);
    if (options.on_final_iterate) options.on_final_iterate(j, sampler.theta());
    if (j >= config.final_burnin) {
      for (int i = 0; i < k; ++i) sum[i] += sampler.theta()[i];
      ++averaged;
    }
  }
  for (double& v : sum) v /= averaged;
  trace.final_estimate = ProbVector(std::move(sum));
  trace.tv_error = TvDistance(trace.final_estimate, trace.ground_truth);
  trace.mean_subset_size =
      std::accumulate(trace.subset_sizes.begin(), trace.subset_sizes.end(), 0.0) /
      static_cast<double>(trace.subset_sizes.size());
  if (trace.fallback_steps > 0) {
    std::clog << "warning: " << trace.fallback_steps
              << " step(s) had every candidate subset disqualified; SRR was used\n";
  }
  return trace;
}

ProbVector DrawGroundTruth(const ExperimentConfig& config, Rng& rng) {
  return SampleDirichlet(DirichletParams::Symmetric(config.num_categories, config.rho), rng);
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<AggregateResult> RunGrid(const std::vector<ExperimentConfig>& configs,
                                     const GridOptions& options) {
  for (const ExperimentConfig& c : configs) c.Validate();

  struct Job {
    int config_index;
    int run;
  };
  std::vector<Job> jobs;
  std::vector<AggregateResult> results(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    results[i].config_index = static_cast<int>(i);
    results[i].runs.resize(configs[i].runs);
    for (int r = 0; r < configs[i].runs; ++r) jobs.push_back({static_cast<int>(i), r});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job job = jobs[j];
      const ExperimentConfig& config = configs[job.config_index];
      RunOutcome& outcome = results[job.config_index].runs[job.run];
      outcome.run = job.run;
      const auto start = std::chrono::steady_clock::now();
      try {
        Rng rng = ChildStream(config.seed, static_cast<std::uint64_t>(job.config_index),
                              static_cast<std::uint64_t>(job.run));
        const ProbVector theta_star = DrawGroundTruth(config, rng);
        const RunTrace trace = RunAdaptiveLoop(config, theta_star, rng);
        outcome.ok = true;
        outcome.tv_error = trace.tv_error;
        outcome.mean_subset_size = trace.mean_subset_size;
      } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
      }
      outcome.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  for (AggregateResult& result : results) {
    double size_sum = 0.0;
    for (const RunOutcome& outcome : result.runs) {
      if (!outcome.ok) {
        ++result.failures;
        continue;
      }
      result.tv_errors.push_back(outcome.tv_error);
      size_sum += outcome.mean_subset_size;
    }
    const auto ok_runs = static_cast<double>(result.tv_errors.size());
    result.median = Quantile(result.tv_errors, 0.5);
    result.lower_quartile = Quantile(result.tv_errors, 0.25);
    result.upper_quartile = Quantile(result.tv_errors, 0.75);
    result.mean_subset_size = ok_runs > 0 ? size_sum / ok_runs : std::nan("");
  }
  return results;
}

ProbVector GeometricTheta(int num_categories, double ratio) {
  Require(ratio > 0.0 && std::isfinite(ratio), "ratio must be > 0");
  std::vector<double> values(num_categories);
  double v = 1.0;
  for (double& x : values) {
    x = v;
    v /= ratio;
  }
  return ProbVector(std::move(values));
}

std::vector<HonestCurveRow> HonestResponseCurves(int num_categories, double epsilon,
                                                 double kappa, const std::vector<double>& ratios) {
  const double e = std::exp(epsilon);
  const double baseline = e / (e + num_categories - 1.0);
  std::vector<HonestCurveRow> rows;
  rows.reserve(ratios.size() * num_categories);
  for (double ratio : ratios) {
    Require(ratio > 1.0, "ratios must be > 1");
    const ProbVector theta = GeometricTheta(num_categories, ratio);
    for (int k = 0; k < num_categories; ++k) {
      std::vector<Category> members(k);
      std::iota(members.begin(), members.end(), 0);
      const MechanismSpec spec(SubsetSpec(num_categories, std::move(members)), epsilon, kappa);
      rows.push_back({ratio, k, UtilityHonestResponse(theta, spec), baseline});
    }
  }
  return rows;
}

}  // namespace adaptive_ldp
