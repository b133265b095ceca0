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

// The online estimation loop and the Monte Carlo driver around it.
//
// At each step t = 1..T the loop
//   1. picks a subset from the previous posterior draw theta_{t-1},
//   2. draws X_t ~ Cat(theta*) and privatizes it with the resulting mechanism,
//   3. advances the posterior sampler, warm-started from its previous state.
// After step T the sampler runs final_mcmc_iters more iterations and the
// estimate is the average of theta over the iterations after final_burnin.

#ifndef ADAPTIVE_LDP_HARNESS_H_
#define ADAPTIVE_LDP_HARNESS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adaptive_ldp/inference.h"
#include "adaptive_ldp/random.h"
#include "adaptive_ldp/simplex.h"
#include "adaptive_ldp/utility.h"

namespace adaptive_ldp {

enum class SelectionKind { kAdaptive, kSemiAdaptive, kNonAdaptive };

struct SelectionMode {
  SelectionKind kind = SelectionKind::kAdaptive;
  UtilityKind utility = UtilityKind::kHonestResponse;  // kAdaptive only
  double alpha = 0.9;                                  // kSemiAdaptive only

  static SelectionMode Adaptive(UtilityKind utility) {
    return {SelectionKind::kAdaptive, utility, 0.9};
  }
  static SelectionMode SemiAdaptive(double alpha) {
    return {SelectionKind::kSemiAdaptive, UtilityKind::kHonestResponse, alpha};
  }
  static SelectionMode NonAdaptive() {
    return {SelectionKind::kNonAdaptive, UtilityKind::kHonestResponse, 0.9};
  }

  friend bool operator==(const SelectionMode&, const SelectionMode&) = default;
};

enum class SamplerKind { kSgld, kGibbs };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kSgld;
  SgldConfig sgld;
  int gibbs_sweeps = 1;  // per step, kGibbs only
};

struct ExperimentConfig {
  int num_categories = 10;
  double epsilon = 1.0;
  double kappa = 0.9;
  double rho = 0.1;  // concentration of the Dir(rho, ..., rho) ground-truth generator
  int steps = 2000;
  SelectionMode mode;
  SamplerConfig sampler;
  int runs = 20;
  std::uint64_t seed = 0;
  int final_mcmc_iters = 2000;
  int final_burnin = 1000;
  double prior_shape = 1.0;  // symmetric Dirichlet prior on theta

  // Throws std::invalid_argument naming the first offending field.
  void Validate() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

struct RunTrace {
  std::vector<int> subset_sizes;
  ProbVector final_estimate = ProbVector::Uniform(2);
  ProbVector ground_truth = ProbVector::Uniform(2);
  double tv_error = 0.0;
  double mean_subset_size = 0.0;
  // Steps where every candidate subset was disqualified and SRR was used.
  int fallback_steps = 0;
  // Steps whose mechanism went through VerifyLdp.
  int audited_steps = 0;
};

// Per-step view handed to a RunOptions::on_step observer.
struct StepRecord {
  int t = 0;
  Category truth = 0;
  Category response = 0;
  const SubsetChoice* choice = nullptr;
  const MechanismSpec* mechanism = nullptr;
  // Sampler state entering and leaving the step (phi for SGLD, theta for Gibbs).
  std::vector<double> state_in;
  std::vector<double> state_out;
  const ProbVector* theta = nullptr;  // posterior draw after the step
};

struct RunOptions {
  std::function<void(const StepRecord&)> on_step;
  // Called for every iteration of the final MCMC phase.
  std::function<void(int, const ProbVector&)> on_final_iterate;
  // Audit every mechanism instead of one step in a hundred.
  bool audit_all_steps = false;
};

// Throws std::invalid_argument for an invalid config or a ground truth of the
// wrong size, std::logic_error if a mechanism fails the LDP audit, and
// std::runtime_error if the sampler diverges.
RunTrace RunAdaptiveLoop(const ExperimentConfig& config, const ProbVector& theta_star, Rng& rng,
                         const RunOptions& options = {});

// theta* ~ Dir(rho, ..., rho), the first draw on a replicate's stream.
ProbVector DrawGroundTruth(const ExperimentConfig& config, Rng& rng);

struct RunOutcome {
  int run = 0;
  bool ok = false;
  double tv_error = 0.0;
  double mean_subset_size = 0.0;
  double wall_seconds = 0.0;
  std::string error;
};

struct AggregateResult {
  int config_index = 0;
  std::vector<RunOutcome> runs;  // in run order, failures included
  std::vector<double> tv_errors; // successful runs only, in run order
  double median = 0.0;
  double lower_quartile = 0.0;
  double upper_quartile = 0.0;
  double mean_subset_size = 0.0;  // over successful runs
  int failures = 0;
};

struct GridOptions {
  int threads = 1;
};

// Replicate r of config i uses ChildStream(config.seed, i, r): theta* is drawn
// from Dir(rho, ..., rho) on that stream and the run continues on it. Runs
// that throw are recorded as failures and left out of the statistics.
std::vector<AggregateResult> RunGrid(const std::vector<ExperimentConfig>& configs,
                                     const GridOptions& options = {});

// Linear-interpolation quantile (q in [0, 1]) of an unsorted sample.
double Quantile(std::vector<double> values, double q);

// theta with theta_i / theta_{i+1} = ratio for all i.
ProbVector GeometricTheta(int num_categories, double ratio);

struct HonestCurveRow {
  double ratio = 0.0;
  int k = 0;
  double honest_probability = 0.0;
  double srr_baseline = 0.0;  // e^eps / (e^eps + K - 1)
};

// P(Y = X) for S = {1..k}, k = 0..K-1, on geometric thetas, next to the SRR
// baseline. Throws std::invalid_argument for a ratio <= 1.
std::vector<HonestCurveRow> HonestResponseCurves(int num_categories, double epsilon,
                                                 double kappa, const std::vector<double>& ratios);

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_HARNESS_H_
