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

#include "adaptive_ldp/inference.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace adaptive_ldp {
namespace {

// out += scale * J s for one observation with likelihood row `row`.
void AddLikelihoodGradient(std::span<const double> phi, double phi_sum,
                           std::span<const double> row, double scale, std::span<double> out) {
  const std::size_t k = phi.size();
  double h = 0.0;
  for (std::size_t x = 0; x < k; ++x) h += row[x] * phi[x];
  h /= phi_sum;
  const double last = row[k - 1];
  // w = sum_{j < K-1} phi_j s_j
  double w = 0.0;
  for (std::size_t j = 0; j + 1 < k; ++j) w += phi[j] * (row[j] - last);
  w /= h;
  const double inv_sum = 1.0 / phi_sum;
  const double common = w * inv_sum * inv_sum;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    out[i] += scale * ((row[i] - last) / h * inv_sum - common);
  }
  out[k - 1] -= scale * common;
}

// Floyd's algorithm: `count` distinct indices from [0, n) in O(count^2),
// independent of n.
std::vector<int> DrawBatch(int n, int count, Rng& rng) {
  std::vector<int> batch;
  batch.reserve(count);
  for (int j = n - count; j < n; ++j) {
    std::uniform_int_distribution<int> pick(0, j);
    const int v = pick(rng);
    if (std::find(batch.begin(), batch.end(), v) == batch.end()) {
      batch.push_back(v);
    } else {
      batch.push_back(j);
    }
  }
  return batch;
}

}  // namespace

GammaState::GammaState(std::vector<double> phi, DirichletParams prior)
    : phi_(std::move(phi)), prior_(std::move(prior)) {
  if (static_cast<int>(phi_.size()) != prior_.size()) {
    throw std::invalid_argument("GammaState: phi and prior sizes differ");
  }
  for (double v : phi_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("GammaState: phi components must be positive and finite");
    }
  }
}

GammaState GammaState::AtPriorMean(const DirichletParams& prior) {
  return GammaState(prior.shapes(), prior);
}

History::History(int num_categories) : num_categories_(num_categories) {
  if (num_categories < 2) throw std::invalid_argument("History needs K >= 2");
}

void History::Append(Category response, const MechanismSpec& mechanism) {
  if (mechanism.num_categories() != num_categories_) {
    throw std::invalid_argument("History: mechanism has the wrong K");
  }
  if (response < 0 || response >= num_categories_) {
    throw std::invalid_argument("History: response " + std::to_string(response) +
                                " outside [0, K)");
  }
  observations_.push_back(Observation{response, mechanism, mechanism.LikelihoodRow(response)});
}

double SgldConfig::StepSize(int t) const {
  switch (schedule) {
    case StepSchedule::kInverseTime:
      return step_scale / std::max(t, 1);
    case StepSchedule::kConstant:
      return step_scale;
  }
  return step_scale;
}

void SgldConfig::Validate() const {
  if (updates_per_step < 0) throw std::invalid_argument("SGLD updates per step must be >= 0");
  if (minibatch < 1) throw std::invalid_argument("SGLD minibatch must be >= 1");
  if (!(step_scale > 0.0)) throw std::invalid_argument("SGLD step scale must be > 0");
}

ProbVector PhiToTheta(const GammaState& state) { return ProbVector(state.phi()); }

std::vector<double> GradLogPrior(const GammaState& state) {
  std::vector<double> grad(state.size());
  for (int i = 0; i < state.size(); ++i) {
    grad[i] = (state.prior()[i] - 1.0) / state.phi()[i] - 1.0;
  }
  return grad;
}

std::vector<double> GradLogLikelihood(const GammaState& state, Category y,
                                      const MechanismSpec& spec) {
  if (spec.num_categories() != state.size()) {
    throw std::invalid_argument("GradLogLikelihood: mechanism has the wrong K");
  }
  const std::vector<double> row = spec.LikelihoodRow(y);
  const double phi_sum = std::accumulate(state.phi().begin(), state.phi().end(), 0.0);
  std::vector<double> grad(state.size(), 0.0);
  AddLikelihoodGradient(state.phi(), phi_sum, row, 1.0, grad);
  return grad;
}

GammaState SgldStep(const GammaState& state, const History& history, const SgldConfig& config,
                    int t, std::span<const int> batch, std::span<const double> noise) {
  const int k = state.size();
  if (static_cast<int>(noise.size()) != k) {
    throw std::invalid_argument("SgldStep: noise has the wrong length");
  }
  if (history.num_categories() != k) {
    throw std::invalid_argument("SgldStep: history has the wrong K");
  }
  const std::vector<double>& phi = state.phi();
  const double phi_sum = std::accumulate(phi.begin(), phi.end(), 0.0);
  std::vector<double> grad = GradLogPrior(state);
  if (!batch.empty()) {
    const double scale = static_cast<double>(history.size()) / static_cast<double>(batch.size());
    for (int u : batch) AddLikelihoodGradient(phi, phi_sum, history[u].likelihood, scale, grad);
  }
  const double gamma = config.StepSize(t);
  const double noise_sd = config.noise == NoiseScale::kLiteral ? gamma : std::sqrt(gamma);
  std::vector<double> next(k);
  for (int i = 0; i < k; ++i) {
    const double v = std::abs(phi[i] + 0.5 * gamma * grad[i] + noise_sd * noise[i]);
    if (!std::isfinite(v)) {
      throw std::runtime_error("SGLD iterate is no longer finite at t=" + std::to_string(t));
    }
    next[i] = std::max(v, kPhiFloor);
  }
  return GammaState(std::move(next), state.prior());
}

GammaState SgldUpdate(const GammaState& state, const History& history, const SgldConfig& config,
                      int t, Rng& rng) {
  if (history.empty()) throw std::invalid_argument("SgldUpdate needs a non-empty history");
  const int n = history.size();
  std::vector<int> batch;
  if (config.minibatch >= n) {
    batch.resize(n);
    std::iota(batch.begin(), batch.end(), 0);
  } else {
    batch = DrawBatch(n, config.minibatch, rng);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(state.size());
  for (double& w : noise) w = normal(rng);
  return SgldStep(state, history, config, t, batch, noise);
}

SgldDraw SgldSample(const History& history, const SgldConfig& config,
                    const GammaState& warm_start, int t, Rng& rng) {
  GammaState state = warm_start;
  for (int j = 0; j < config.updates_per_step; ++j) {
    state = SgldUpdate(state, history, config, t, rng);
  }
  ProbVector theta = PhiToTheta(state);
  return SgldDraw{std::move(state), std::move(theta)};
}

GibbsState GibbsSweep(const GibbsState& state, const History& history,
                      const DirichletParams& prior, Rng& rng) {
  const int k = prior.size();
  if (state.theta.size() != k || history.num_categories() != k) {
    throw std::invalid_argument("GibbsSweep: inconsistent K");
  }
  GibbsState next{std::vector<Category>(history.size()), state.theta};
  std::vector<double> counts(k, 0.0);
  std::vector<double> weights(k);
  for (int t = 0; t < history.size(); ++t) {
    const std::vector<double>& row = history[t].likelihood;
    for (int x = 0; x < k; ++x) weights[x] = state.theta[x] * row[x];
    const Category x = SampleCategorical(std::span<const double>(weights), rng);
    next.latent[t] = x;
    counts[x] += 1.0;
  }
  std::vector<double> shapes(k);
  for (int i = 0; i < k; ++i) shapes[i] = prior[i] + counts[i];
  next.theta = SampleDirichlet(DirichletParams(std::move(shapes)), rng);
  return next;
}

}  // namespace adaptive_ldp
