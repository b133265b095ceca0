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

// Scores for how informative one randomized response is about theta, and the
// subset search that maximizes them.
//
// Every score is evaluated as if X ~ Cat(theta) and Y is the output of the
// given mechanism. With g the transition table and h(y) = sum_x g(y|x) theta_x:
//
//   FisherTraceInv     -Tr[F^-1],  F = A^T diag(1/h) A,  A(i,j) = g(i|j) - g(i|K)
//   NegEntropy         sum_y h(y) ln h(y)
//   TvPosteriorShift   1/2 sum_x sum_y |g(y|x) theta_x - h(y) theta_x|
//   TvMarginalMatch    -TV(h, theta)
//   NegBayesMse        sum_y sum_x g(y|x)^2 theta_x^2 / h(y) - 1
//   HonestResponse     P(Y = X)
//
// Candidate subsets are the prefixes of theta sorted in decreasing order,
// sizes 0 through K-1.

#ifndef ADAPTIVE_LDP_UTILITY_H_
#define ADAPTIVE_LDP_UTILITY_H_

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptive_ldp/mechanism.h"
#include "adaptive_ldp/simplex.h"

namespace adaptive_ldp {

enum class UtilityKind {
  kFisherTraceInv,
  kNegEntropy,
  kTvPosteriorShift,
  kTvMarginalMatch,
  kNegBayesMse,
  kHonestResponse,
};

// Short names used on the command line and in JSON: fisher, entropy,
// tv-posterior, tv-marginal, mse, honest.
std::string_view UtilityName(UtilityKind kind);
std::optional<UtilityKind> ParseUtilityKind(std::string_view name);

// Returned by the Fisher score when the matrix is too ill-conditioned to
// invert reliably; the candidate is then disqualified.
inline constexpr double kDisqualified = -std::numeric_limits<double>::infinity();

// Guard on the 1-norm condition number of F.
inline constexpr double kMaxFisherCondition = 1e12;

// (K-1) x (K-1) information matrix in the reduced coordinates theta_1..theta_{K-1}.
struct FisherMatrix {
  Eigen::MatrixXd matrix;
};

// Throws std::invalid_argument if theta has a zero component or its size does
// not match the mechanism.
FisherMatrix ComputeFisherMatrix(const ProbVector& theta, const MechanismSpec& spec);

double UtilityFisherTraceInv(const ProbVector& theta, const MechanismSpec& spec);
double UtilityNegEntropy(const ProbVector& theta, const MechanismSpec& spec);
double UtilityTvPosteriorShift(const ProbVector& theta, const MechanismSpec& spec);
double UtilityTvMarginalMatch(const ProbVector& theta, const MechanismSpec& spec);
double UtilityNegBayesMse(const ProbVector& theta, const MechanismSpec& spec);
double UtilityHonestResponse(const ProbVector& theta, const MechanismSpec& spec);

double EvaluateUtility(UtilityKind kind, const ProbVector& theta, const MechanismSpec& spec);

// Tally of floating-point operations, for checking cost contracts.
struct OpCounter {
  std::uint64_t ops = 0;
};

// P(Y = X) for every prefix size k = 0..K-1 of `order`, built incrementally
// from running sums in O(K) after sorting.
std::vector<double> HonestResponsePrefixValues(const ProbVector& theta,
                                               const SortPermutation& order, double epsilon,
                                               double kappa, OpCounter* counter = nullptr);

struct SubsetChoice {
  int k_star = 0;
  SubsetSpec subset;
  // One entry per candidate prefix size. For the semi-adaptive rule these are
  // the cumulative probabilities P(X in S_k).
  std::vector<double> utility_values;
  // Every candidate was disqualified and plain SRR was chosen instead.
  bool fell_back = false;
};

// Evaluates `kind` at every prefix (each with its own epsilon2) and returns
// the maximizer, preferring the smallest k on ties.
SubsetChoice SelectSubset(const ProbVector& theta, double epsilon, double kappa, UtilityKind kind);

// Smallest prefix whose probability under theta reaches alpha, capped at K-1.
// Throws std::invalid_argument unless 0 < alpha < 1.
SubsetChoice SelectSubsetSemiAdaptive(const ProbVector& theta, double alpha);

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_UTILITY_H_
