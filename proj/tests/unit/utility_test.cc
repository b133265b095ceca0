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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "adaptive_ldp/harness.h"
#include "test_helpers.h"

namespace adaptive_ldp {
namespace {

namespace oracle = testing::oracle;

MechanismSpec PrefixSpec(int k_total, int k, double eps, double kappa) {
  std::vector<Category> members(k);
  std::iota(members.begin(), members.end(), 0);
  return MechanismSpec(SubsetSpec(k_total, std::move(members)), eps, kappa);
}

const ProbVector& Theta532() {
  static const ProbVector theta({0.5, 0.3, 0.2});
  return theta;
}

TEST(UtilityNameTest, RoundTrips) {
  for (UtilityKind kind :
       {UtilityKind::kFisherTraceInv, UtilityKind::kNegEntropy, UtilityKind::kTvPosteriorShift,
        UtilityKind::kTvMarginalMatch, UtilityKind::kNegBayesMse, UtilityKind::kHonestResponse}) {
    EXPECT_EQ(ParseUtilityKind(UtilityName(kind)), kind);
  }
  EXPECT_FALSE(ParseUtilityKind("nope").has_value());
}

TEST(UtilityOracleTest, AllScoresMatchHighPrecisionValues) {
  for (int k = 0; k < 3; ++k) {
    const MechanismSpec spec = PrefixSpec(3, k, 1.0, 0.9);
    const double* row = oracle::kUtilities[k];
    EXPECT_NEAR(UtilityFisherTraceInv(Theta532(), spec), row[0], 1e-10 * std::abs(row[0]))
        << "k=" << k;
    EXPECT_NEAR(UtilityNegEntropy(Theta532(), spec), row[1], 1e-12) << "k=" << k;
    EXPECT_NEAR(UtilityTvPosteriorShift(Theta532(), spec), row[2], 1e-12) << "k=" << k;
    EXPECT_NEAR(UtilityTvMarginalMatch(Theta532(), spec), row[3], 1e-12) << "k=" << k;
    EXPECT_NEAR(UtilityNegBayesMse(Theta532(), spec), row[4], 1e-12) << "k=" << k;
    EXPECT_NEAR(UtilityHonestResponse(Theta532(), spec), row[5], 1e-12) << "k=" << k;
  }
  const ProbVector theta4({0.4, 0.3, 0.2, 0.1});
  EXPECT_NEAR(UtilityNegBayesMse(theta4, PrefixSpec(4, 2, 1.0, 0.9)), oracle::kNegBayesMseK4,
              1e-12);
}

TEST(FisherMatrixTest, NearlyNoiselessBinaryIsBernoulliInformation) {
  for (double p : {0.1, 0.3, 0.5, 0.8}) {
    const ProbVector theta({p, 1.0 - p});
    const FisherMatrix f = ComputeFisherMatrix(theta, MechanismSpec::Srr(2, 30.0));
    ASSERT_EQ(f.matrix.rows(), 1);
    const double expected = 1.0 / (p * (1.0 - p));
    EXPECT_NEAR(f.matrix(0, 0), expected, 1e-3 * expected);
  }
}

TEST(FisherMatrixTest, RequiresInteriorTheta) {
  EXPECT_THROW(ComputeFisherMatrix(ProbVector({1.0, 0.0, 0.0}), MechanismSpec::Srr(3, 1.0)),
               std::invalid_argument);
  EXPECT_THROW(UtilityFisherTraceInv(ProbVector::Uniform(4), MechanismSpec::Srr(3, 1.0)),
               std::invalid_argument);
}

TEST(FisherMatrixTest, RandomPairsAreSymmetricPositiveDefinite) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(2, 20)(rng);
    const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 2.0), rng);
    if (!theta.IsInterior()) continue;
    const double eps = std::array<double, 3>{0.5, 1.0, 5.0}[trial % 3];
    const double kappa = std::array<double, 2>{0.8, 0.9}[trial % 2];
    const MechanismSpec spec = PrefixSpec(k_total, trial % k_total, eps, kappa);
    const Eigen::MatrixXd f = ComputeFisherMatrix(theta, spec).matrix;
    ASSERT_LE((f - f.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    ASSERT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(f).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(FisherTraceInvTest, BinaryIsReciprocalOfInformation) {
  const ProbVector theta({0.35, 0.65});
  const MechanismSpec spec = MechanismSpec::Srr(2, 0.7);
  EXPECT_NEAR(UtilityFisherTraceInv(theta, spec),
              -1.0 / ComputeFisherMatrix(theta, spec).matrix(0, 0), 1e-12);
}

TEST(FisherTraceInvTest, MatchesExplicitTwoByTwoInverse) {
  const MechanismSpec spec = PrefixSpec(3, 1, 1.0, 0.9);
  const Eigen::MatrixXd f = ComputeFisherMatrix(Theta532(), spec).matrix;
  const double det = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
  const double trace_inv = (f(0, 0) + f(1, 1)) / det;
  EXPECT_NEAR(UtilityFisherTraceInv(Theta532(), spec), -trace_inv, 1e-10 * trace_inv);
}

TEST(FisherTraceInvTest, NearlyZeroEpsilon2NeverGivesNan) {
  const ProbVector theta = ProbVector::Uniform(12);
  for (int k = 0; k < 12; ++k) {
    const double u = UtilityFisherTraceInv(theta, PrefixSpec(12, k, 1.0, 1.0 - 1e-13));
    EXPECT_FALSE(std::isnan(u));
    EXPECT_TRUE(u == kDisqualified || u < 0.0);
  }
}

TEST(NegEntropyTest, UniformMarginalAndDegenerateLimit) {
  EXPECT_NEAR(UtilityNegEntropy(ProbVector::Uniform(6), MechanismSpec::Srr(6, 1.0)),
              -std::log(6.0), 1e-12);
  EXPECT_NEAR(UtilityNegEntropy(ProbVector({1.0, 0.0}), MechanismSpec::Srr(2, 30.0)), 0.0, 1e-10);
}

TEST(TvPosteriorShiftTest, UninformativeAndPointMass) {
  EXPECT_NEAR(UtilityTvPosteriorShift(Theta532(), MechanismSpec::Srr(3, 1e-6)), 0.0, 1e-6);
  EXPECT_NEAR(UtilityTvPosteriorShift(ProbVector({1.0, 0.0, 0.0}), PrefixSpec(3, 1, 1.0, 0.9)),
              0.0, 1e-15);
}

TEST(TvMarginalMatchTest, IdentityLimitAndFixedPoint) {
  EXPECT_NEAR(UtilityTvMarginalMatch(Theta532(), MechanismSpec::Srr(3, 30.0)), 0.0, 1e-12);
  EXPECT_NEAR(UtilityTvMarginalMatch(ProbVector::Uniform(5), MechanismSpec::Srr(5, 0.3)), 0.0,
              1e-15);
}

TEST(TvMarginalMatchTest, EqualsDistanceBetweenMarginalAndTheta) {
  const MechanismSpec spec = PrefixSpec(3, 2, 1.0, 0.9);
  const ProbVector h = ResponseMarginal(BuildTransitionMatrix(spec), Theta532());
  EXPECT_NEAR(UtilityTvMarginalMatch(Theta532(), spec), -TvDistance(h, Theta532()), 1e-12);
}

TEST(NegBayesMseTest, NoiselessAndPointMassLimits) {
  EXPECT_NEAR(UtilityNegBayesMse(Theta532(), MechanismSpec::Srr(3, 30.0)), 0.0, 1e-10);
  EXPECT_NEAR(UtilityNegBayesMse(ProbVector({0.0, 1.0, 0.0}), PrefixSpec(3, 1, 1.0, 0.9)), 0.0,
              1e-15);
}

TEST(HonestResponseTest, SrrBaseline) {
  const double u = UtilityHonestResponse(ProbVector::Uniform(20), MechanismSpec::Srr(20, 1.0));
  EXPECT_NEAR(u, oracle::kSrrHonestK20, 1e-12);
  EXPECT_NEAR(UtilityHonestResponse(Theta532(), MechanismSpec::Srr(3, 30.0)), 1.0, 1e-12);
}

TEST(HonestResponseTest, EqualsThetaWeightedDiagonal) {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(2, 15)(rng);
    const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 0.8), rng);
    std::vector<Category> all(k_total);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(trial % k_total);
    const MechanismSpec spec(SubsetSpec(k_total, all), 0.2 + trial % 5, 0.85);
    const TransitionMatrix g = BuildTransitionMatrix(spec);
    double diagonal = 0.0;
    for (int x = 0; x < k_total; ++x) diagonal += theta[x] * g(x, x);
    EXPECT_NEAR(UtilityHonestResponse(theta, spec), diagonal, 1e-12);
  }
}

TEST(HonestResponseTest, SrrValueIncreasesWithEpsilon) {
  const ProbVector theta({0.6, 0.25, 0.1, 0.05});
  double previous = 0.0;
  for (double eps = 0.05; eps < 10.0; eps += 0.25) {
    const double u = UtilityHonestResponse(theta, MechanismSpec::Srr(4, eps));
    EXPECT_GT(u, previous);
    previous = u;
  }
}

TEST(UtilityRangeTest, ValuesStayInDocumentedRanges) {
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(2, 12)(rng);
    const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 0.5), rng);
    const MechanismSpec spec = PrefixSpec(k_total, trial % k_total, 0.1 + trial % 6, 0.9);
    const double u2 = UtilityNegEntropy(theta, spec);
    EXPECT_GE(u2, -std::log(k_total) - 1e-12);
    EXPECT_LE(u2, 1e-12);
    const double u3 = UtilityTvPosteriorShift(theta, spec);
    EXPECT_GE(u3, -1e-12);
    EXPECT_LE(u3, 1.0 + 1e-12);
    const double u4 = UtilityTvMarginalMatch(theta, spec);
    EXPECT_GE(u4, -1.0 - 1e-12);
    EXPECT_LE(u4, 1e-12);
    const double u5 = UtilityNegBayesMse(theta, spec);
    EXPECT_GE(u5, -1.0 - 1e-12);
    EXPECT_LE(u5, 1e-12);
    const double u6 = UtilityHonestResponse(theta, spec);
    EXPECT_GT(u6, 0.0);
    EXPECT_LE(u6, 1.0 + 1e-12);
  }
}

TEST(UtilityInvarianceTest, RelabelingLeavesScoresUnchanged) {
  Rng rng(44);
  // theta'[perm[i]] = theta[i], S' = perm(S).
  const auto check = [](const ProbVector& theta, const std::vector<Category>& members,
                        const std::vector<Category>& perm, std::initializer_list<UtilityKind> kinds) {
    const int k_total = theta.size();
    std::vector<double> permuted(k_total);
    for (int i = 0; i < k_total; ++i) permuted[perm[i]] = theta[i];
    std::vector<Category> permuted_members;
    for (Category c : members) permuted_members.push_back(perm[c]);
    const MechanismSpec spec(SubsetSpec(k_total, members), 1.0, 0.8);
    const MechanismSpec permuted_spec(SubsetSpec(k_total, permuted_members), 1.0, 0.8);
    const ProbVector theta_p(permuted);
    for (UtilityKind kind : kinds) {
      const double a = EvaluateUtility(kind, theta, spec);
      const double b = EvaluateUtility(kind, theta_p, permuted_spec);
      if (a == kDisqualified) {
        EXPECT_EQ(b, kDisqualified);
        continue;
      }
      EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::abs(a))) << UtilityName(kind);
    }
  };
  for (int trial = 0; trial < 100; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(3, 9)(rng);
    const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 1.5), rng);
    const int k = trial % k_total;
    std::vector<Category> members(k);
    std::iota(members.begin(), members.end(), 0);
    std::vector<Category> perm(k_total);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    check(theta, members, perm,
          {UtilityKind::kFisherTraceInv, UtilityKind::kNegEntropy, UtilityKind::kTvPosteriorShift,
           UtilityKind::kTvMarginalMatch, UtilityKind::kNegBayesMse, UtilityKind::kHonestResponse});
  }
}

TEST(SelectSubsetTest, GeometricThetaBeatsSrr) {
  const ProbVector theta = GeometricTheta(20, 2.0);
  const SubsetChoice choice = SelectSubset(theta, 1.0, 0.9, UtilityKind::kHonestResponse);
  ASSERT_EQ(choice.utility_values.size(), 20u);
  EXPECT_GT(choice.k_star, 0);
  EXPECT_GT(choice.utility_values[choice.k_star], choice.utility_values[0]);
  EXPECT_FALSE(choice.fell_back);
}

TEST(SelectSubsetTest, ChoiceIsArgmaxWithSmallestTieBreak) {
  Rng rng(45);
  for (int trial = 0; trial < 300; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(2, 10)(rng);
    const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 1.0), rng);
    const UtilityKind kind = static_cast<UtilityKind>(trial % 6);
    if (kind == UtilityKind::kFisherTraceInv && !theta.IsInterior()) continue;
    const SubsetChoice choice = SelectSubset(theta, 1.0, 0.9, kind);
    const auto& v = choice.utility_values;
    ASSERT_EQ(static_cast<int>(v.size()), k_total);
    for (int k = 0; k < k_total; ++k) {
      if (k < choice.k_star) EXPECT_LT(v[k], v[choice.k_star]);
      else EXPECT_LE(v[k], v[choice.k_star]);
    }
    EXPECT_EQ(choice.subset, SubsetSpec::Prefix(SortDescending(theta), choice.k_star));
  }
}

TEST(SelectSubsetTest, UniformThetaHasDeterministicChoice) {
  const ProbVector theta = ProbVector::Uniform(8);
  const SubsetChoice a = SelectSubset(theta, 5.0, 0.9, UtilityKind::kHonestResponse);
  const SubsetChoice b = SelectSubset(theta, 5.0, 0.9, UtilityKind::kHonestResponse);
  EXPECT_EQ(a.k_star, b.k_star);
  EXPECT_EQ(a.utility_values, b.utility_values);
  ASSERT_EQ(a.utility_values.size(), 8u);
  for (double v : a.utility_values) EXPECT_TRUE(std::isfinite(v));
}

TEST(SelectSubsetTest, PrefixValuesMatchDirectEvaluation) {
  Rng rng(46);
  for (int trial = 0; trial < 100; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(2, 30)(rng);
    const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 0.3), rng);
    const SortPermutation order = SortDescending(theta);
    const std::vector<double> fast = HonestResponsePrefixValues(theta, order, 1.0, 0.9);
    for (int k = 0; k < k_total; ++k) {
      const MechanismSpec spec(SubsetSpec::Prefix(order, k), 1.0, 0.9);
      EXPECT_NEAR(fast[k], UtilityHonestResponse(theta, spec), 1e-14);
    }
  }
}

TEST(SelectSubsetTest, PrefixMaximumEqualsSubsetMaximum) {
  Rng rng(47);
  for (int k_total = 2; k_total <= 8; ++k_total) {
    for (int rep = 0; rep < 50; ++rep) {
      const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 1.0), rng);
      double brute = -1.0;
      for (unsigned mask = 0; mask + 1 < (1u << k_total); ++mask) {
        std::vector<Category> members;
        for (int i = 0; i < k_total; ++i) {
          if (mask & (1u << i)) members.push_back(i);
        }
        brute = std::max(brute, UtilityHonestResponse(
                                    theta, MechanismSpec(SubsetSpec(k_total, members), 1.0, 0.9)));
      }
      const SortPermutation order = SortDescending(theta);
      double prefix = -1.0;
      for (int k = 0; k < k_total; ++k) {
        prefix = std::max(prefix, UtilityHonestResponse(
                                      theta, MechanismSpec(SubsetSpec::Prefix(order, k), 1.0, 0.9)));
      }
      ASSERT_EQ(prefix, brute) << "K=" << k_total << " rep=" << rep;
    }
  }
}

TEST(SelectSubsetTest, FisherRequiresInteriorTheta) {
  EXPECT_THROW(SelectSubset(ProbVector({1.0, 0.0, 0.0}), 1.0, 0.9, UtilityKind::kFisherTraceInv),
               std::invalid_argument);
}

TEST(SelectSubsetTest, AllDisqualifiedFallsBackToSrr) {
  // e^epsilon rounds to 1, so every mechanism is uniform and every Fisher
  // matrix vanishes.
  const SubsetChoice choice =
      SelectSubset(ProbVector::Uniform(6), 1e-20, 0.9, UtilityKind::kFisherTraceInv);
  ASSERT_EQ(choice.utility_values.size(), 6u);
  for (double u : choice.utility_values) EXPECT_EQ(u, kDisqualified);
  EXPECT_TRUE(choice.fell_back);
  EXPECT_EQ(choice.k_star, 0);
  EXPECT_EQ(choice.subset.size(), 0);
}

TEST(SemiAdaptiveTest, Examples) {
  EXPECT_EQ(SelectSubsetSemiAdaptive(Theta532(), 0.5).k_star, 1);
  EXPECT_EQ(SelectSubsetSemiAdaptive(Theta532(), 0.9).k_star, 2);
  EXPECT_EQ(SelectSubsetSemiAdaptive(ProbVector::Uniform(10), 0.95).k_star, 9);
  const SubsetChoice c = SelectSubsetSemiAdaptive(ProbVector({0.2, 0.5, 0.3}), 0.6);
  EXPECT_EQ(c.k_star, 2);
  EXPECT_EQ(c.subset.members(), (std::vector<Category>{1, 2}));
}

TEST(SemiAdaptiveTest, ChoiceIsSmallestPrefixReachingAlpha) {
  Rng rng(48);
  for (int trial = 0; trial < 500; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(2, 20)(rng);
    const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 0.5), rng);
    const double alpha = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    const SubsetChoice c = SelectSubsetSemiAdaptive(theta, alpha);
    const std::vector<Category>& order = SortDescending(theta).order;
    double mass = 0.0;
    for (int i = 0; i < c.k_star; ++i) mass += theta[order[i]];
    if (c.k_star < k_total - 1) EXPECT_GE(mass, alpha);
    if (c.k_star > 0) EXPECT_LT(mass - theta[order[c.k_star - 1]], alpha);
  }
}

TEST(SemiAdaptiveTest, RejectsAlphaOutsideUnitInterval) {
  EXPECT_THROW(SelectSubsetSemiAdaptive(Theta532(), 0.0), std::invalid_argument);
  EXPECT_THROW(SelectSubsetSemiAdaptive(Theta532(), 1.0), std::invalid_argument);
}

TEST(CostContractTest, PrefixEvaluationCountIsLinear) {
  std::vector<std::uint64_t> ops;
  for (int k_total : {100, 1000, 10000}) {
    const ProbVector theta = GeometricTheta(k_total, 1.001);
    OpCounter counter;
    HonestResponsePrefixValues(theta, SortDescending(theta), 1.0, 0.9, &counter);
    ops.push_back(counter.ops);
  }
  EXPECT_LT(ops[2], 3 * 10 * ops[1]);
  EXPECT_LT(ops[1], 3 * 10 * ops[0]);
  EXPECT_GT(ops[2], 5 * ops[1]);
}

}  // namespace
}  // namespace adaptive_ldp
