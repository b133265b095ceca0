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

// Probability-simplex value types and the basic samplers built on them.

#ifndef ADAPTIVE_LDP_SIMPLEX_H_
#define ADAPTIVE_LDP_SIMPLEX_H_

#include <cstddef>
#include <span>
#include <vector>

#include "adaptive_ldp/random.h"

namespace adaptive_ldp {

// Category index, zero-based, in [0, K).
using Category = int;

// A point on the (K-1)-simplex. Construction renormalizes any non-negative,
// finite, not-all-zero input so the components sum to one.
class ProbVector {
 public:
  // Throws std::invalid_argument if K < 2, a component is negative or not
  // finite, or every component is zero.
  explicit ProbVector(std::vector<double> values);

  static ProbVector Uniform(int num_categories);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  // True when every component is strictly positive.
  bool IsInterior() const;

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  std::vector<double> values_;
};

// Indices of a ProbVector ordered by non-increasing probability; ties keep
// ascending index order.
struct SortPermutation {
  std::vector<Category> order;
};

// Concentration parameters of a Dirichlet law; all strictly positive.
class DirichletParams {
 public:
  explicit DirichletParams(std::vector<double> shapes);
  static DirichletParams Symmetric(int num_categories, double shape);

  int size() const { return static_cast<int>(shapes_.size()); }
  double operator[](std::size_t i) const { return shapes_[i]; }
  const std::vector<double>& shapes() const { return shapes_; }

 private:
  std::vector<double> shapes_;
};

// Normalized independent Gamma(shape_k, 1) draws. Shapes below one are drawn
// in log space (Gamma(a) = Gamma(a + 1) * U^(1/a)) so that concentrations such
// as 0.01 cannot underflow every component to zero.
ProbVector SampleDirichlet(const DirichletParams& params, Rng& rng);

Category SampleCategorical(const ProbVector& theta, Rng& rng);

// Same as above on an unnormalized non-negative weight vector.
Category SampleCategorical(std::span<const double> weights, Rng& rng);

SortPermutation SortDescending(const ProbVector& theta);

// Half the L1 distance. Throws std::invalid_argument on size mismatch.
double TvDistance(const ProbVector& a, const ProbVector& b);
double TvDistance(std::span<const double> a, std::span<const double> b);

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_SIMPLEX_H_
