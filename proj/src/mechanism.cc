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

#include "adaptive_ldp/mechanism.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace adaptive_ldp {

double DeriveEpsilon2(double epsilon, double epsilon1, int complement_size, int subset_size) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be a positive finite number");
  }
  if (!(epsilon1 > 0.0)) {
    throw std::invalid_argument("epsilon1 must be > 0");
  }
  if (epsilon1 > epsilon) {
    throw std::invalid_argument("epsilon1 must not exceed epsilon");
  }
  if (complement_size < 1) {
    throw std::invalid_argument("subset complement is empty; S = [K] is not allowed");
  }
  if (subset_size < 0) {
    throw std::invalid_argument("subset size must be >= 0");
  }
  const double m = complement_size;
  if (subset_size == 0 || epsilon - epsilon1 >= std::log(m)) return epsilon;
  // Here m >= 2 and e^(eps1 - eps) m > 1, so the ratio is >= 1.
  const double ratio = (m - 1.0) / (std::exp(epsilon1 - epsilon) * m - 1.0);
  return std::clamp(std::log(ratio), 0.0, epsilon);
}

PrivacyBudget::PrivacyBudget(double epsilon, double kappa, int num_categories, int subset_size)
    : epsilon_(epsilon), kappa_(kappa), epsilon1_(kappa * epsilon) {
  if (!(epsilon > 0.0 && epsilon <= kMaxEpsilon)) {
    throw std::invalid_argument("epsilon must be in (0, 700]");
  }
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw std::invalid_argument("kappa must be in (0,1)");
  }
  if (subset_size < 0 || subset_size > num_categories - 1) {
    throw std::invalid_argument("subset size must be in [0, K-1]");
  }
  epsilon2_ = DeriveEpsilon2(epsilon, epsilon1_, num_categories - subset_size, subset_size);
}

SubsetSpec::SubsetSpec(int num_categories, std::vector<Category> members)
    : members_(std::move(members)), mask_(std::max(num_categories, 0), 0) {
  if (num_categories < 2) {
    throw std::invalid_argument("SubsetSpec needs K >= 2");
  }
  for (Category c : members_) {
    if (c < 0 || c >= num_categories) {
      throw std::invalid_argument("subset member " + std::to_string(c) + " outside [0, K)");
    }
    if (mask_[c]) {
      throw std::invalid_argument("duplicate subset member " + std::to_string(c));
    }
    mask_[c] = 1;
  }
  if (size() >= num_categories) {
    throw std::invalid_argument("subset must leave at least one category out");
  }
  complement_.reserve(num_categories - size());
  for (Category c = 0; c < num_categories; ++c) {
    if (!mask_[c]) complement_.push_back(c);
  }
}

SubsetSpec SubsetSpec::Prefix(const SortPermutation& order, int size) {
  const int k = static_cast<int>(order.order.size());
  if (size < 0 || size > k - 1) {
    throw std::invalid_argument("prefix size must be in [0, K-1]");
  }
  return SubsetSpec(k, std::vector<Category>(order.order.begin(), order.order.begin() + size));
}

MechanismSpec::MechanismSpec(SubsetSpec subset, double epsilon, double kappa)
    : subset_(std::move(subset)),
      budget_(epsilon, kappa, subset_.num_categories(), subset_.size()) {
  const double k = subset_.size();
  const double big_k = subset_.num_categories();
  const double e1 = std::exp(budget_.epsilon1());
  const double e2 = std::exp(budget_.epsilon2());
  inside_honest_ = e1 / (e1 + k);
  inside_other_ = 1.0 / (e1 + k);
  inside_to_outside_ = inside_other_ / (big_k - k);
  outside_honest_ = e2 / (e2 + big_k - k - 1.0) * inside_honest_;
  outside_other_ = 1.0 / (e2 + big_k - k - 1.0) * inside_honest_;
}

MechanismSpec MechanismSpec::Srr(int num_categories, double epsilon, double kappa) {
  return MechanismSpec(SubsetSpec::Empty(num_categories), epsilon, kappa);
}

double MechanismSpec::Probability(Category y, Category x) const {
  const bool x_in = subset_.Contains(x);
  const bool y_in = subset_.Contains(y);
  if (x_in) {
    if (y == x) return inside_honest_;
    return y_in ? inside_other_ : inside_to_outside_;
  }
  if (y_in) return inside_other_;
  return y == x ? outside_honest_ : outside_other_;
}

std::vector<double> MechanismSpec::LikelihoodRow(Category y) const {
  const int k = num_categories();
  std::vector<double> row(k);
  for (Category x = 0; x < k; ++x) row[x] = Probability(y, x);
  return row;
}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() != probs_.cols() || probs_.rows() < 2) {
    throw std::invalid_argument("TransitionMatrix must be square with K >= 2");
  }
  for (Eigen::Index x = 0; x < probs_.cols(); ++x) {
    if ((probs_.col(x).array() < 0.0).any()) {
      throw std::invalid_argument("TransitionMatrix entries must be >= 0");
    }
    if (std::abs(probs_.col(x).sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("TransitionMatrix column " + std::to_string(x) +
                                  " does not sum to 1");
    }
  }
}

TransitionMatrix BuildTransitionMatrix(const MechanismSpec& spec) {
  const int k = spec.num_categories();
  Eigen::MatrixXd probs(k, k);
  for (Category x = 0; x < k; ++x) {
    for (Category y = 0; y < k; ++y) probs(y, x) = spec.Probability(y, x);
  }
  return TransitionMatrix(std::move(probs));
}

LdpReport VerifyLdp(const Eigen::MatrixXd& probs, double epsilon) {
  LdpReport report;
  report.epsilon = epsilon;
  const Eigen::Index k = probs.rows();
  for (Eigen::Index y = 0; y < k; ++y) {
    for (Eigen::Index x = 0; x < probs.cols(); ++x) {
      for (Eigen::Index xp = 0; xp < probs.cols(); ++xp) {
        const double a = probs(y, x);
        const double b = probs(y, xp);
        double ratio;
        if (a == b) {
          ratio = 0.0;
        } else if (a <= 0.0 || b <= 0.0) {
          ratio = std::numeric_limits<double>::infinity();
        } else {
          ratio = std::abs(std::log(a) - std::log(b));
        }
        if (ratio > report.max_log_ratio) {
          report.max_log_ratio = ratio;
          report.worst_x = static_cast<Category>(x);
          report.worst_x_prime = static_cast<Category>(xp);
          report.worst_y = static_cast<Category>(y);
        }
      }
    }
  }
  report.certified = report.max_log_ratio <= epsilon * (1.0 + 1e-9);
  return report;
}

LdpReport VerifyLdp(const TransitionMatrix& matrix, double epsilon) {
  return VerifyLdp(matrix.probs(), epsilon);
}

namespace {

// Uniform draw from the sorted `pool` excluding `skip`, which must be in it.
Category UniformOther(std::span<const Category> pool, Category skip, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 2);
  std::size_t i = pick(rng);
  const auto pos =
      static_cast<std::size_t>(std::lower_bound(pool.begin(), pool.end(), skip) - pool.begin());
  if (i >= pos) ++i;
  return pool[i];
}

bool Honest(double epsilon, std::size_t domain_size, Rng& rng) {
  if (domain_size <= 1) return true;
  const double e = std::exp(epsilon);
  std::bernoulli_distribution coin(e / (e + static_cast<double>(domain_size) - 1.0));
  return coin(rng);
}

}  // namespace

Category Randomize(const MechanismSpec& spec, Category x, Rng& rng) {
  const SubsetSpec& subset = spec.subset();
  const auto& complement = subset.complement();
  const double eps1 = spec.budget().epsilon1();
  const double eps2 = spec.budget().epsilon2();
  const std::size_t k = subset.size();

  // R: the single complement element admitted to the response set.
  Category r;
  if (subset.Contains(x)) {
    std::uniform_int_distribution<std::size_t> pick(0, complement.size() - 1);
    r = complement[pick(rng)];
  } else {
    r = Honest(eps2, complement.size(), rng) ? x : UniformOther(complement, x, rng);
  }

  // Outer SRR on S + {R}; k == 0 makes this the identity.
  const Category input = subset.Contains(x) ? x : r;
  if (k == 0 || Honest(eps1, k + 1, rng)) return input;
  // Uniform among the k elements of S + {R} other than `input`.
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  const std::size_t i = pick(rng);
  const auto& members = subset.members();
  if (input == r) return members[i];
  // input is in S: the candidates are S minus input, plus R.
  if (i == k - 1) return r;
  const auto pos = static_cast<std::size_t>(std::find(members.begin(), members.end(), input) -
                                            members.begin());
  return members[i >= pos ? i + 1 : i];
}

ProbVector ResponseMarginal(const TransitionMatrix& matrix, const ProbVector& theta) {
  if (matrix.num_categories() != theta.size()) {
    throw std::invalid_argument("ResponseMarginal: dimension mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> th(theta.values().data(), theta.size());
  const Eigen::VectorXd h = matrix.probs() * th;
  return ProbVector(std::vector<double>(h.data(), h.data() + h.size()));
}

}  // namespace adaptive_ldp
