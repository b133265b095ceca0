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

#include "adaptive_ldp/utility.h"

#include <cmath>
#include <stdexcept>

namespace adaptive_ldp {
namespace {

void CheckSizes(const ProbVector& theta, const MechanismSpec& spec) {
  if (theta.size() != spec.num_categories()) {
    throw std::invalid_argument("theta and mechanism disagree on K");
  }
}

Eigen::Map<const Eigen::VectorXd> AsEigen(const ProbVector& theta) {
  return Eigen::Map<const Eigen::VectorXd>(theta.values().data(), theta.size());
}

// Operation counts charged per prefix step in HonestResponsePrefixValues.
constexpr std::uint64_t kEpsilon2Ops = 8;  // log, exp, mul, sub, div, log, compare
constexpr std::uint64_t kPrefixStepOps = 12;

}  // namespace

std::string_view UtilityName(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::kFisherTraceInv:
      return "fisher";
    case UtilityKind::kNegEntropy:
      return "entropy";
    case UtilityKind::kTvPosteriorShift:
      return "tv-posterior";
    case UtilityKind::kTvMarginalMatch:
      return "tv-marginal";
    case UtilityKind::kNegBayesMse:
      return "mse";
    case UtilityKind::kHonestResponse:
      return "honest";
  }
  return "unknown";
}

std::optional<UtilityKind> ParseUtilityKind(std::string_view name) {
  for (UtilityKind kind :
       {UtilityKind::kFisherTraceInv, UtilityKind::kNegEntropy, UtilityKind::kTvPosteriorShift,
        UtilityKind::kTvMarginalMatch, UtilityKind::kNegBayesMse, UtilityKind::kHonestResponse}) {
    if (UtilityName(kind) == name) return kind;
  }
  return std::nullopt;
}

FisherMatrix ComputeFisherMatrix(const ProbVector& theta, const MechanismSpec& spec) {
  CheckSizes(theta, spec);
  if (!theta.IsInterior()) {
    throw std::invalid_argument("Fisher information needs theta strictly inside the simplex");
  }
  const int k = theta.size();
  const Eigen::MatrixXd g = BuildTransitionMatrix(spec).probs();
  const Eigen::VectorXd h = g * AsEigen(theta);
  // A(i, j) = g(i|j) - g(i|K) over the first K-1 columns.
  const Eigen::MatrixXd a = g.leftCols(k - 1).colwise() - g.col(k - 1);
  const Eigen::MatrixXd scaled = h.cwiseInverse().asDiagonal() * a;
  FisherMatrix fisher{a.transpose() * scaled};
  // Symmetrize away rounding asymmetry from the two products.
  fisher.matrix = 0.5 * (fisher.matrix + fisher.matrix.transpose()).eval();
  return fisher;
}

double UtilityFisherTraceInv(const ProbVector& theta, const MechanismSpec& spec) {
  CheckSizes(theta, spec);
  // The trace of the inverse depends on which coordinate is dropped. Relabel
  // into descending-theta order first so that it is always the least
  // probable category and the score depends only on sorted theta and S.
  const SortPermutation order = SortDescending(theta);
  const int big_k = theta.size();
  std::vector<Category> rank(big_k);
  std::vector<double> sorted(big_k);
  for (int r = 0; r < big_k; ++r) {
    rank[order.order[r]] = r;
    sorted[r] = theta[order.order[r]];
  }
  std::vector<Category> members;
  for (Category c : spec.subset().members()) members.push_back(rank[c]);
  const MechanismSpec relabeled(SubsetSpec(big_k, std::move(members)), spec.budget().epsilon(),
                                spec.budget().kappa());
  const FisherMatrix fisher = ComputeFisherMatrix(ProbVector(std::move(sorted)), relabeled);
  const Eigen::LLT<Eigen::MatrixXd> llt(fisher.matrix);
  if (llt.info() != Eigen::Success) return kDisqualified;
  const Eigen::Index n = fisher.matrix.rows();
  const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const double norm = fisher.matrix.cwiseAbs().colwise().sum().maxCoeff();
  const double inverse_norm = inverse.cwiseAbs().colwise().sum().maxCoeff();
  const double condition = norm * inverse_norm;
  if (!std::isfinite(condition) || condition > kMaxFisherCondition) return kDisqualified;
  const double trace = inverse.trace();
  if (!std::isfinite(trace) || trace <= 0.0) return kDisqualified;
  return -trace;
}

double UtilityNegEntropy(const ProbVector& theta, const MechanismSpec& spec) {
  CheckSizes(theta, spec);
  const Eigen::VectorXd h = BuildTransitionMatrix(spec).probs() * AsEigen(theta);
  double sum = 0.0;
  for (double v : h) {
    if (v > 0.0) sum += v * std::log(v);
  }
  return sum;
}

double UtilityTvPosteriorShift(const ProbVector& theta, const MechanismSpec& spec) {
  CheckSizes(theta, spec);
  const Eigen::MatrixXd g = BuildTransitionMatrix(spec).probs();
  const Eigen::VectorXd h = g * AsEigen(theta);
  double sum = 0.0;
  for (Eigen::Index x = 0; x < g.cols(); ++x) {
    sum += theta[x] * (g.col(x) - h).cwiseAbs().sum();
  }
  return 0.5 * sum;
}

double UtilityTvMarginalMatch(const ProbVector& theta, const MechanismSpec& spec) {
  CheckSizes(theta, spec);
  const Eigen::VectorXd h = BuildTransitionMatrix(spec).probs() * AsEigen(theta);
  return -0.5 * (h - AsEigen(theta)).cwiseAbs().sum();
}

double UtilityNegBayesMse(const ProbVector& theta, const MechanismSpec& spec) {
  CheckSizes(theta, spec);
  const Eigen::MatrixXd g = BuildTransitionMatrix(spec).probs();
  const Eigen::VectorXd h = g * AsEigen(theta);
  double sum = 0.0;
  for (Eigen::Index y = 0; y < g.rows(); ++y) {
    if (h(y) <= 0.0) continue;
    double row = 0.0;
    for (Eigen::Index x = 0; x < g.cols(); ++x) {
      const double joint = g(y, x) * theta[x];
      row += joint * joint;
    }
    sum += row / h(y);
  }
  return sum - 1.0;
}

double UtilityHonestResponse(const ProbVector& theta, const MechanismSpec& spec) {
  CheckSizes(theta, spec);
  const SubsetSpec& subset = spec.subset();
  const int k = subset.size();
  const int big_k = theta.size();
  // Sums run in index order so that equal sets give bit-identical values.
  double inside = 0.0;
  double outside = 0.0;
  for (Category i = 0; i < big_k; ++i) {
    (subset.Contains(i) ? inside : outside) += theta[i];
  }
  const double e1 = std::exp(spec.budget().epsilon1());
  const double e2 = std::exp(spec.budget().epsilon2());
  return e1 / (e1 + k) * (inside + e2 / (e2 + big_k - k - 1) * outside);
}

double EvaluateUtility(UtilityKind kind, const ProbVector& theta, const MechanismSpec& spec) {
  switch (kind) {
    case UtilityKind::kFisherTraceInv:
      return UtilityFisherTraceInv(theta, spec);
    case UtilityKind::kNegEntropy:
      return UtilityNegEntropy(theta, spec);
    case UtilityKind::kTvPosteriorShift:
      return UtilityTvPosteriorShift(theta, spec);
    case UtilityKind::kTvMarginalMatch:
      return UtilityTvMarginalMatch(theta, spec);
    case UtilityKind::kNegBayesMse:
      return UtilityNegBayesMse(theta, spec);
    case UtilityKind::kHonestResponse:
      return UtilityHonestResponse(theta, spec);
  }
  throw std::invalid_argument("unknown utility kind");
}

std::vector<double> HonestResponsePrefixValues(const ProbVector& theta,
                                               const SortPermutation& order, double epsilon,
                                               double kappa, OpCounter* counter) {
  const int big_k = theta.size();
  if (static_cast<int>(order.order.size()) != big_k) {
    throw std::invalid_argument("permutation and theta disagree on K");
  }
  std::uint64_t ops = 0;
  const double epsilon1 = kappa * epsilon;
  const double e1 = std::exp(epsilon1);
  ops += 2;
  std::vector<double> values(big_k);
  double inside = 0.0;
  for (int k = 0; k < big_k; ++k) {
    if (k > 0) {
      inside += theta[order.order[k - 1]];
      ops += 1;
    }
    const double outside = std::max(0.0, 1.0 - inside);
    const double e2 = std::exp(DeriveEpsilon2(epsilon, epsilon1, big_k - k, k));
    ops += kEpsilon2Ops;
    values[k] = e1 / (e1 + k) * (inside + e2 / (e2 + big_k - k - 1) * outside);
    ops += kPrefixStepOps;
  }
  if (counter != nullptr) counter->ops += ops;
  return values;
}

SubsetChoice SelectSubset(const ProbVector& theta, double epsilon, double kappa, UtilityKind kind) {
  const int big_k = theta.size();
  if (kind == UtilityKind::kFisherTraceInv && !theta.IsInterior()) {
    throw std::invalid_argument("Fisher utility needs theta strictly inside the simplex");
  }
  const SortPermutation order = SortDescending(theta);
  std::vector<double> values;
  if (kind == UtilityKind::kHonestResponse) {
    values = HonestResponsePrefixValues(theta, order, epsilon, kappa);
  } else {
    values.resize(big_k);
    for (int k = 0; k < big_k; ++k) {
      const MechanismSpec spec(SubsetSpec::Prefix(order, k), epsilon, kappa);
      values[k] = EvaluateUtility(kind, theta, spec);
    }
  }
  int best = -1;
  for (int k = 0; k < big_k; ++k) {
    if (std::isnan(values[k]) || values[k] == kDisqualified) continue;
    if (best < 0 || values[k] > values[best]) best = k;
  }
  const bool fell_back = best < 0;
  if (fell_back) best = 0;
  return SubsetChoice{best, SubsetSpec::Prefix(order, best), std::move(values), fell_back};
}

SubsetChoice SelectSubsetSemiAdaptive(const ProbVector& theta, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0,1)");
  }
  const int big_k = theta.size();
  const SortPermutation order = SortDescending(theta);
  std::vector<double> cumulative(big_k);
  double mass = 0.0;
  int chosen = -1;
  for (int k = 0; k < big_k; ++k) {
    if (k > 0) mass += theta[order.order[k - 1]];
    cumulative[k] = mass;
    if (chosen < 0 && mass >= alpha) chosen = k;
  }
  // Reaching alpha needs all K categories; S = [K] is not a valid subset.
  if (chosen < 0) chosen = big_k - 1;
  return SubsetChoice{chosen, SubsetSpec::Prefix(order, chosen), std::move(cumulative), false};
}

}  // namespace adaptive_ldp
