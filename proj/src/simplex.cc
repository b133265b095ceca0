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

#include "adaptive_ldp/simplex.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace adaptive_ldp {

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw std::invalid_argument("ProbVector needs at least 2 categories, got " +
                                std::to_string(values_.size()));
  }
  double total = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("ProbVector components must be finite and >= 0");
    }
    total += v;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("ProbVector components are all zero");
  }
  for (double& v : values_) v /= total;
}

ProbVector ProbVector::Uniform(int num_categories) {
  if (num_categories < 2) {
    throw std::invalid_argument("ProbVector needs at least 2 categories");
  }
  return ProbVector(std::vector<double>(num_categories, 1.0));
}

bool ProbVector::IsInterior() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

DirichletParams::DirichletParams(std::vector<double> shapes) : shapes_(std::move(shapes)) {
  if (shapes_.size() < 2) {
    throw std::invalid_argument("DirichletParams needs at least 2 shapes");
  }
  for (double a : shapes_) {
    if (!std::isfinite(a) || a <= 0.0) {
      throw std::invalid_argument("Dirichlet shapes must be finite and > 0");
    }
  }
}

DirichletParams DirichletParams::Symmetric(int num_categories, double shape) {
  return DirichletParams(std::vector<double>(std::max(num_categories, 0), shape));
}

ProbVector SampleDirichlet(const DirichletParams& params, Rng& rng) {
  const int k = params.size();
  std::vector<double> log_draws(k);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < k; ++i) {
    const double a = params[i];
    if (a >= 1.0) {
      std::gamma_distribution<double> gamma(a, 1.0);
      log_draws[i] = std::log(gamma(rng));
    } else {
      std::gamma_distribution<double> gamma(a + 1.0, 1.0);
      double u = unit(rng);
      while (u <= 0.0) u = unit(rng);
      log_draws[i] = std::log(gamma(rng)) + std::log(u) / a;
    }
  }
  const double top = *std::max_element(log_draws.begin(), log_draws.end());
  std::vector<double> weights(k);
  for (int i = 0; i < k; ++i) weights[i] = std::exp(log_draws[i] - top);
  return ProbVector(std::move(weights));
}

Category SampleCategorical(std::span<const double> weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("SampleCategorical: weights must have a positive finite sum");
  }
  std::uniform_real_distribution<double> unit(0.0, total);
  const double u = unit(rng);
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = static_cast<int>(i);
    if (u < cumulative) return last_positive;
  }
  // Rounding left u at or past the final cumulative sum.
  return last_positive;
}

Category SampleCategorical(const ProbVector& theta, Rng& rng) {
  return SampleCategorical(theta.values(), rng);
}

SortPermutation SortDescending(const ProbVector& theta) {
  SortPermutation perm;
  perm.order.resize(theta.size());
  std::iota(perm.order.begin(), perm.order.end(), 0);
  std::stable_sort(perm.order.begin(), perm.order.end(),
                   [&theta](Category a, Category b) { return theta[a] > theta[b]; });
  return perm;
}

double TvDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("TvDistance: dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

double TvDistance(const ProbVector& a, const ProbVector& b) {
  return TvDistance(a.values(), b.values());
}

}  // namespace adaptive_ldp
