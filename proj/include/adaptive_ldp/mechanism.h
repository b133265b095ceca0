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

// Local randomizers over K categories.
//
// The standard randomized response SRR(x; Omega, eps) reports x with
// probability e^eps / (e^eps + |Omega| - 1) and otherwise a uniformly chosen
// other element of Omega. The restricted mechanism used here takes a subset S
// of likely categories:
//
//   x in S:      draw R uniformly from the complement S^c, then report
//                SRR(x; S + {R}, eps1).
//   x not in S:  R = SRR(x; S^c, eps2), then report SRR(R; S + {R}, eps1).
//
// With eps1 <= eps and eps2 given by DeriveEpsilon2 the composite is eps-LDP.
// An empty S with eps2 = eps is plain SRR on [K].
//
// Matrices are oriented with outputs y on rows and inputs x on columns, so the
// response marginal is h = G * theta.

#ifndef ADAPTIVE_LDP_MECHANISM_H_
#define ADAPTIVE_LDP_MECHANISM_H_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "adaptive_ldp/random.h"
#include "adaptive_ldp/simplex.h"

namespace adaptive_ldp {

// Budget of the complement-side randomizer. Returns epsilon when the subset is
// empty or epsilon - epsilon1 >= ln(complement_size); otherwise
//   min{epsilon, ln((m - 1) / (e^(epsilon1 - epsilon) m - 1))},  m = complement_size.
// Throws std::invalid_argument unless 0 < epsilon1 <= epsilon and
// complement_size >= 1.
double DeriveEpsilon2(double epsilon, double epsilon1, int complement_size, int subset_size);

// Largest supported epsilon; e^epsilon must stay finite.
inline constexpr double kMaxEpsilon = 700.0;

// (epsilon, kappa, epsilon1 = kappa * epsilon, epsilon2) for one subset size.
class PrivacyBudget {
 public:
  // Throws std::invalid_argument unless 0 < epsilon <= kMaxEpsilon,
  // 0 < kappa < 1 and 0 <= subset_size <= num_categories - 1.
  PrivacyBudget(double epsilon, double kappa, int num_categories, int subset_size);

  double epsilon() const { return epsilon_; }
  double kappa() const { return kappa_; }
  double epsilon1() const { return epsilon1_; }
  double epsilon2() const { return epsilon2_; }

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;

 private:
  double epsilon_;
  double kappa_;
  double epsilon1_;
  double epsilon2_;
};

// A subset S of [K] that is never all of [K].
class SubsetSpec {
 public:
  // Throws std::invalid_argument on duplicate or out-of-range members, or when
  // the subset would cover every category.
  SubsetSpec(int num_categories, std::vector<Category> members);

  static SubsetSpec Empty(int num_categories) { return SubsetSpec(num_categories, {}); }
  // The first `size` entries of `order`.
  static SubsetSpec Prefix(const SortPermutation& order, int size);

  int num_categories() const { return static_cast<int>(mask_.size()); }
  int size() const { return static_cast<int>(members_.size()); }
  int complement_size() const { return num_categories() - size(); }
  bool Contains(Category x) const { return mask_[x] != 0; }
  const std::vector<Category>& members() const { return members_; }
  const std::vector<Category>& complement() const { return complement_; }

  friend bool operator==(const SubsetSpec& a, const SubsetSpec& b) {
    return a.members_ == b.members_ && a.mask_.size() == b.mask_.size();
  }

 private:
  std::vector<Category> members_;
  std::vector<Category> complement_;
  std::vector<char> mask_;
};

// A fully parameterized randomizer: subset plus the budget derived for it.
class MechanismSpec {
 public:
  MechanismSpec(SubsetSpec subset, double epsilon, double kappa);

  // Plain SRR on [K] (empty subset, epsilon2 = epsilon).
  static MechanismSpec Srr(int num_categories, double epsilon, double kappa = 0.9);

  const SubsetSpec& subset() const { return subset_; }
  const PrivacyBudget& budget() const { return budget_; }
  int num_categories() const { return subset_.num_categories(); }

  // g(y | x), the probability of reporting y when the true category is x.
  double Probability(Category y, Category x) const;

  // The row g(y | .) over all inputs; the likelihood of one observation.
  std::vector<double> LikelihoodRow(Category y) const;

  friend bool operator==(const MechanismSpec& a, const MechanismSpec& b) {
    return a.subset_ == b.subset_ && a.budget_ == b.budget_;
  }

 private:
  SubsetSpec subset_;
  PrivacyBudget budget_;
  // Cached case-table values.
  double inside_honest_;      // e^eps1 / (e^eps1 + k)
  double inside_other_;       // 1 / (e^eps1 + k)
  double outside_honest_;     // e^eps2 / (e^eps2 + K - k - 1) * e^eps1 / (e^eps1 + k)
  double outside_other_;      // 1 / (e^eps2 + K - k - 1) * e^eps1 / (e^eps1 + k)
  double inside_to_outside_;  // 1 / (K - k) * 1 / (e^eps1 + k)
};

// K x K matrix with entry (y, x) = g(y | x).
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Eigen::MatrixXd probs);

  int num_categories() const { return static_cast<int>(probs_.rows()); }
  const Eigen::MatrixXd& probs() const { return probs_; }
  double operator()(Category y, Category x) const { return probs_(y, x); }

 private:
  Eigen::MatrixXd probs_;
};

TransitionMatrix BuildTransitionMatrix(const MechanismSpec& spec);

struct LdpReport {
  double epsilon = 0.0;
  // max over (x, x', y) of |ln G(y, x) - ln G(y, x')|.
  double max_log_ratio = 0.0;
  Category worst_x = 0;
  Category worst_x_prime = 0;
  Category worst_y = 0;
  // max_log_ratio <= epsilon * (1 + 1e-9).
  bool certified = false;
};

// Exhaustive check over all K^3 triples. The raw-matrix overload accepts
// matrices that are not column-stochastic so that corrupted tables can be
// audited too.
LdpReport VerifyLdp(const TransitionMatrix& matrix, double epsilon);
LdpReport VerifyLdp(const Eigen::MatrixXd& probs, double epsilon);

// One draw from the sequential two-stage sampler described above.
Category Randomize(const MechanismSpec& spec, Category x, Rng& rng);

// h(. | theta) = G * theta. Throws std::invalid_argument on size mismatch.
ProbVector ResponseMarginal(const TransitionMatrix& matrix, const ProbVector& theta);

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_MECHANISM_H_
