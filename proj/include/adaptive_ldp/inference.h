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

// Posterior sampling for theta given privatized responses.
//
// The posterior is pi(theta | y_1:n) ∝ Dir(theta; rho) prod_t h_t(y_t | theta),
// where h_t is the response marginal of the mechanism used at step t.
//
// SGLD runs on an unconstrained-sign surrogate: phi_k ~ Gamma(rho_k, 1)
// independently, theta = phi / sum(phi). Each update is
//
//   phi <- | phi + (gamma/2) (grad ln p(phi) + (n/b) sum_{u in batch} grad ln h_u(y_u | theta(phi)))
//            + noise |
//
// with Gaussian noise of standard deviation gamma (kLiteral) or
// sqrt(gamma) (kSqrtStep), and the absolute value keeping phi positive.
//
// The Gibbs sampler alternates exact draws of the latent true categories and
// theta. It costs O(nK) per sweep and serves mainly as a reference.

#ifndef ADAPTIVE_LDP_INFERENCE_H_
#define ADAPTIVE_LDP_INFERENCE_H_

#include <span>
#include <vector>

#include "adaptive_ldp/mechanism.h"
#include "adaptive_ldp/random.h"
#include "adaptive_ldp/simplex.h"

namespace adaptive_ldp {

// Lower bound applied to phi components after reflection.
inline constexpr double kPhiFloor = 1e-300;

class GammaState {
 public:
  // Throws std::invalid_argument on size mismatch or a non-positive component.
  GammaState(std::vector<double> phi, DirichletParams prior);

  // phi_k = rho_k, the prior means; theta(phi) is the prior mean of theta.
  static GammaState AtPriorMean(const DirichletParams& prior);

  int size() const { return static_cast<int>(phi_.size()); }
  const std::vector<double>& phi() const { return phi_; }
  const DirichletParams& prior() const { return prior_; }

  friend bool operator==(const GammaState& a, const GammaState& b) {
    return a.phi_ == b.phi_ && a.prior_.shapes() == b.prior_.shapes();
  }

 private:
  std::vector<double> phi_;
  DirichletParams prior_;
};

struct Observation {
  Category response;
  MechanismSpec mechanism;
  // g(response | x) for every x.
  std::vector<double> likelihood;
};

// Responses together with the mechanisms that produced them.
class History {
 public:
  explicit History(int num_categories);

  // Throws std::invalid_argument if the response or mechanism do not match K.
  void Append(Category response, const MechanismSpec& mechanism);

  int num_categories() const { return num_categories_; }
  int size() const { return static_cast<int>(observations_.size()); }
  bool empty() const { return observations_.empty(); }
  const Observation& operator[](std::size_t t) const { return observations_[t]; }
  const std::vector<Observation>& observations() const { return observations_; }

 private:
  int num_categories_;
  std::vector<Observation> observations_;
};

enum class NoiseScale {
  kLiteral,  // noise standard deviation gamma
  kSqrtStep,      // noise standard deviation sqrt(gamma)
};

enum class StepSchedule {
  kInverseTime,  // gamma_t = scale / t
  kConstant,     // gamma_t = scale
};

struct SgldConfig {
  int updates_per_step = 20;
  int minibatch = 50;
  StepSchedule schedule = StepSchedule::kInverseTime;
  double step_scale = 0.5;
  NoiseScale noise = NoiseScale::kLiteral;

  // Step size at outer time step t >= 1; the same for all inner updates.
  double StepSize(int t) const;
  // Throws std::invalid_argument on a non-positive count or step scale.
  void Validate() const;
};

ProbVector PhiToTheta(const GammaState& state);

// (rho_i - 1) / phi_i - 1.
std::vector<double> GradLogPrior(const GammaState& state);

// Gradient of phi -> ln h(y | theta(phi)): J s with J(i, j) = [i == j] / Phi -
// phi_j / Phi^2 (K x (K-1)) and s_j = (g(y|j) - g(y|K)) / h(y | theta).
std::vector<double> GradLogLikelihood(const GammaState& state, Category y,
                                      const MechanismSpec& spec);

// One update with the minibatch and standard-normal noise supplied by the
// caller. `batch` holds distinct history indices.
GammaState SgldStep(const GammaState& state, const History& history, const SgldConfig& config,
                    int t, std::span<const int> batch, std::span<const double> noise);

// One update: draws min(m, n) indices without replacement (none are drawn when
// m >= n; the whole history is used), then K standard normals, then applies
// SgldStep. Throws std::invalid_argument on an empty history and
// std::runtime_error if phi stops being finite.
GammaState SgldUpdate(const GammaState& state, const History& history, const SgldConfig& config,
                      int t, Rng& rng);

struct SgldDraw {
  GammaState state;
  ProbVector theta;
};

// config.updates_per_step updates from `warm_start`.
SgldDraw SgldSample(const History& history, const SgldConfig& config,
                    const GammaState& warm_start, int t, Rng& rng);

struct GibbsState {
  std::vector<Category> latent;
  ProbVector theta;
};

// Resamples every latent category from theta_x g(y_t|x) / h(y_t|theta), then
// theta from Dir(rho + counts). Latent entries beyond the previous length are
// created as needed.
GibbsState GibbsSweep(const GibbsState& state, const History& history,
                      const DirichletParams& prior, Rng& rng);

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_INFERENCE_H_
