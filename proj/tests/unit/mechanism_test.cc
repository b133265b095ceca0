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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "test_helpers.h"

namespace adaptive_ldp {
namespace {

using testing::ChiSquarePValue;

MechanismSpec PrefixSpec(int k_total, int k, double eps, double kappa) {
  std::vector<Category> members(k);
  std::iota(members.begin(), members.end(), 0);
  return MechanismSpec(SubsetSpec(k_total, std::move(members)), eps, kappa);
}

// The six-case table written out independently of the library.
double CaseTable(int k_total, const std::vector<Category>& s, double e1, double e2, Category y,
                 Category x) {
  const auto in = [&](Category c) { return std::find(s.begin(), s.end(), c) != s.end(); };
  const double k = static_cast<double>(s.size());
  const double a = std::exp(e1);
  const double b = std::exp(e2);
  if (in(x)) {
    if (y == x) return a / (a + k);
    if (in(y)) return 1.0 / (a + k);
    return 1.0 / (k_total - k) / (a + k);
  }
  if (in(y)) return 1.0 / (a + k);
  if (y == x) return b / (b + k_total - k - 1) * a / (a + k);
  return 1.0 / (b + k_total - k - 1) * a / (a + k);
}

TEST(DeriveEpsilon2Test, EmptySubsetKeepsFullBudget) {
  EXPECT_EQ(DeriveEpsilon2(1.0, 0.9, 10, 0), 1.0);
  EXPECT_EQ(DeriveEpsilon2(0.1, 0.05, 3, 0), 0.1);
}

TEST(DeriveEpsilon2Test, MatchesHighPrecisionValue) {
  EXPECT_NEAR(DeriveEpsilon2(1.0, 0.9, 15, 5), testing::oracle::kEpsilon2K20S5, 1e-12);
}

TEST(DeriveEpsilon2Test, LargeGapKeepsFullBudget) {
  // 5 - 1 = 4 >= ln 3.
  EXPECT_EQ(DeriveEpsilon2(5.0, 1.0, 3, 2), 5.0);
}

TEST(DeriveEpsilon2Test, SingletonComplementKeepsFullBudget) {
  EXPECT_EQ(DeriveEpsilon2(1.0, 0.9, 1, 4), 1.0);
}

TEST(DeriveEpsilon2Test, RejectsInvalidArguments) {
  EXPECT_THROW(DeriveEpsilon2(1.0, 1.5, 3, 1), std::invalid_argument);
  EXPECT_THROW(DeriveEpsilon2(1.0, 0.5, 0, 3), std::invalid_argument);
  EXPECT_THROW(DeriveEpsilon2(0.0, 0.0, 3, 1), std::invalid_argument);
  EXPECT_THROW(DeriveEpsilon2(1.0, 0.0, 3, 1), std::invalid_argument);
}

TEST(DeriveEpsilon2Test, StaysWithinZeroAndEpsilon) {
  for (double eps : {0.01, 0.1, 0.5, 1.0, 5.0, 20.0}) {
    for (double kappa : {0.1, 0.5, 0.8, 0.9, 0.99, 0.999999}) {
      for (int m = 1; m <= 40; ++m) {
        const double e2 = DeriveEpsilon2(eps, kappa * eps, m, 3);
        EXPECT_GE(e2, 0.0);
        EXPECT_LE(e2, eps);
      }
    }
  }
}

TEST(PrivacyBudgetTest, SplitsEpsilon) {
  const PrivacyBudget budget(2.0, 0.75, 10, 3);
  EXPECT_EQ(budget.epsilon1(), 1.5);
  EXPECT_EQ(budget.epsilon2(), DeriveEpsilon2(2.0, 1.5, 7, 3));
}

TEST(PrivacyBudgetTest, RejectsOutOfRangeParameters) {
  try {
    PrivacyBudget(1.0, 1.5, 10, 0);
    FAIL() << "expected std::invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "kappa must be in (0,1)");
  }
  EXPECT_THROW(PrivacyBudget(1.0, 0.0, 10, 0), std::invalid_argument);
  EXPECT_THROW(PrivacyBudget(-1.0, 0.5, 10, 0), std::invalid_argument);
  EXPECT_THROW(PrivacyBudget(1e4, 0.5, 10, 0), std::invalid_argument);
  EXPECT_THROW(PrivacyBudget(1.0, 0.5, 10, 10), std::invalid_argument);
}

TEST(SubsetSpecTest, RejectsInvalidMembers) {
  EXPECT_THROW(SubsetSpec(4, {0, 0}), std::invalid_argument);
  EXPECT_THROW(SubsetSpec(4, {4}), std::invalid_argument);
  EXPECT_THROW(SubsetSpec(4, {-1}), std::invalid_argument);
  EXPECT_THROW(SubsetSpec(3, {0, 1, 2}), std::invalid_argument);
}

TEST(SubsetSpecTest, ComplementAndPrefix) {
  const SubsetSpec s(5, {3, 1});
  EXPECT_EQ(s.size(), 2);
  EXPECT_EQ(s.complement(), (std::vector<Category>{0, 2, 4}));
  EXPECT_TRUE(s.Contains(3));
  EXPECT_FALSE(s.Contains(0));
  const SubsetSpec p = SubsetSpec::Prefix(SortPermutation{{2, 0, 1}}, 2);
  EXPECT_EQ(p.members(), (std::vector<Category>{2, 0}));
  EXPECT_THROW(SubsetSpec::Prefix(SortPermutation{{2, 0, 1}}, 3), std::invalid_argument);
}

TEST(TransitionMatrixTest, EmptySubsetIsSrr) {
  const double eps = 1.3;
  const int k_total = 6;
  const TransitionMatrix g = BuildTransitionMatrix(MechanismSpec::Srr(k_total, eps));
  const double e = std::exp(eps);
  for (int y = 0; y < k_total; ++y) {
    for (int x = 0; x < k_total; ++x) {
      EXPECT_NEAR(g(y, x), y == x ? e / (e + k_total - 1) : 1.0 / (e + k_total - 1), 1e-15);
    }
  }
}

TEST(TransitionMatrixTest, LogTwoBudgetGivesHalf) {
  // eps1 = ln 2 with kappa = 0.5 and eps = 2 ln 2.
  const MechanismSpec spec(SubsetSpec(4, {0, 1}), 2.0 * std::log(2.0), 0.5);
  EXPECT_NEAR(BuildTransitionMatrix(spec)(0, 0), 0.5, 1e-15);
}

TEST(TransitionMatrixTest, MatchesCaseTableForRandomSpecs) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(2, 12)(rng);
    const int k = std::uniform_int_distribution<int>(0, k_total - 1)(rng);
    std::vector<Category> all(k_total);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(k);
    const double eps = std::uniform_real_distribution<double>(0.05, 6.0)(rng);
    const double kappa = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const MechanismSpec spec(SubsetSpec(k_total, all), eps, kappa);
    const TransitionMatrix g = BuildTransitionMatrix(spec);
    const double e1 = spec.budget().epsilon1();
    const double e2 = spec.budget().epsilon2();
    for (int x = 0; x < k_total; ++x) {
      double column = 0.0;
      for (int y = 0; y < k_total; ++y) {
        ASSERT_NEAR(g(y, x), CaseTable(k_total, all, e1, e2, y, x), 1e-14);
        ASSERT_EQ(g(y, x), spec.Probability(y, x));
        ASSERT_GT(g(y, x), 0.0);
        column += g(y, x);
      }
      ASSERT_NEAR(column, 1.0, 1e-12);
    }
  }
}

TEST(TransitionMatrixTest, HonestProbabilityInsideSubset) {
  const MechanismSpec spec = PrefixSpec(10, 4, 1.0, 0.8);
  const TransitionMatrix g = BuildTransitionMatrix(spec);
  const double a = std::exp(0.8);
  for (int x = 0; x < 4; ++x) EXPECT_NEAR(g(x, x), a / (a + 4), 1e-15);
}

TEST(TransitionMatrixTest, ZeroEpsilon2IsWellDefined) {
  // kappa close to 1 drives epsilon2 to 0 for large complements.
  const MechanismSpec spec = PrefixSpec(30, 2, 1.0, 1.0 - 1e-12);
  EXPECT_GE(spec.budget().epsilon2(), 0.0);
  EXPECT_LT(spec.budget().epsilon2(), 1e-9);
  const TransitionMatrix g = BuildTransitionMatrix(spec);
  for (int x = 0; x < 30; ++x) EXPECT_NEAR(g.probs().col(x).sum(), 1.0, 1e-12);
  EXPECT_TRUE(VerifyLdp(g, 1.0).certified);
}

TEST(TransitionMatrixTest, RejectsNonStochasticMatrices) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0);
  m(0, 0) = 0.5;
  EXPECT_THROW(TransitionMatrix{m}, std::invalid_argument);
  EXPECT_THROW(TransitionMatrix{Eigen::MatrixXd::Constant(2, 3, 0.5)}, std::invalid_argument);
}

TEST(VerifyLdpTest, SrrAttainsEpsilonExactly) {
  const LdpReport report = VerifyLdp(BuildTransitionMatrix(MechanismSpec::Srr(5, 1.0)), 1.0);
  EXPECT_NEAR(report.max_log_ratio, 1.0, 1e-14);
  EXPECT_TRUE(report.certified);
  // The worst triple compares the honest cell with an off-diagonal cell.
  EXPECT_TRUE(report.worst_y == report.worst_x || report.worst_y == report.worst_x_prime);
  EXPECT_NE(report.worst_x, report.worst_x_prime);
}

TEST(VerifyLdpTest, CorruptedEntryFailsCertification) {
  Eigen::MatrixXd g = BuildTransitionMatrix(MechanismSpec::Srr(5, 1.0)).probs();
  g(0, 0) *= 2.0;
  const LdpReport report = VerifyLdp(g, 1.0);
  EXPECT_FALSE(report.certified);
  EXPECT_NEAR(report.max_log_ratio, 1.0 + std::log(2.0), 1e-12);
}

TEST(VerifyLdpTest, CertifiesEveryGridMechanism) {
  for (int k_total : {2, 3, 5, 10, 20}) {
    for (double eps : {0.1, 0.5, 1.0, 5.0}) {
      for (double kappa : {0.5, 0.8, 0.9}) {
        for (int k = 0; k < k_total; ++k) {
          const LdpReport report =
              VerifyLdp(BuildTransitionMatrix(PrefixSpec(k_total, k, eps, kappa)), eps);
          ASSERT_TRUE(report.certified)
              << "K=" << k_total << " eps=" << eps << " kappa=" << kappa << " k=" << k;
        }
      }
    }
  }
}

TEST(RandomizeTest, LargeEpsilonBinaryIsTruthful) {
  Rng rng(31);
  const MechanismSpec spec = MechanismSpec::Srr(2, 20.0);
  int same = 0;
  for (int i = 0; i < 10000; ++i) same += Randomize(spec, 1, rng) == 1;
  EXPECT_GT(same / 10000.0, 0.999);
}

TEST(RandomizeTest, SingletonComplementPassesInputToOuterStage) {
  // S = {0, 1, 2}, complement {3}: an input outside S always enters the outer
  // stage as itself, so Y = 3 exactly when the outer SRR is honest.
  Rng rng(32);
  const MechanismSpec spec = PrefixSpec(4, 3, 1.0, 0.9);
  const TransitionMatrix g = BuildTransitionMatrix(spec);
  std::vector<std::int64_t> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[Randomize(spec, 3, rng)];
  const double a = std::exp(0.9);
  EXPECT_NEAR(g(3, 3), a / (a + 3), 1e-15);
  std::vector<double> column(4);
  for (int y = 0; y < 4; ++y) column[y] = g(y, 3);
  EXPECT_GT(ChiSquarePValue(counts, column), 1e-3);
}

TEST(RandomizeTest, EmpiricalLawMatchesMatrixColumns) {
  Rng rng(33);
  const MechanismSpec spec = PrefixSpec(20, 5, 1.0, 0.9);
  const TransitionMatrix g = BuildTransitionMatrix(spec);
  const int n = 100000;
  for (int x = 0; x < 20; ++x) {
    std::vector<std::int64_t> counts(20, 0);
    for (int i = 0; i < n; ++i) ++counts[Randomize(spec, x, rng)];
    std::vector<double> column(20);
    for (int y = 0; y < 20; ++y) column[y] = g(y, x);
    EXPECT_GT(ChiSquarePValue(counts, column), 1e-3) << "x=" << x;
  }
}

TEST(RandomizeTest, RandomSpecsAgreeWithMatrix) {
  Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const int k_total = std::uniform_int_distribution<int>(2, 10)(rng);
    const int k = std::uniform_int_distribution<int>(0, k_total - 1)(rng);
    std::vector<Category> all(k_total);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(k);
    const double eps = std::uniform_real_distribution<double>(0.1, 4.0)(rng);
    const MechanismSpec spec(SubsetSpec(k_total, all), eps, 0.8);
    const TransitionMatrix g = BuildTransitionMatrix(spec);
    // Columns are checked at a Bonferroni-adjusted level.
    for (int x = 0; x < k_total; ++x) {
      std::vector<std::int64_t> counts(k_total, 0);
      for (int i = 0; i < 100000; ++i) ++counts[Randomize(spec, x, rng)];
      std::vector<double> column(k_total);
      for (int y = 0; y < k_total; ++y) column[y] = g(y, x);
      EXPECT_GT(ChiSquarePValue(counts, column), 1e-5) << "trial " << trial << " x=" << x;
    }
  }
}

TEST(ResponseMarginalTest, UniformThetaUnderSrrIsUniform) {
  const ProbVector h =
      ResponseMarginal(BuildTransitionMatrix(MechanismSpec::Srr(7, 0.7)), ProbVector::Uniform(7));
  for (double v : h) EXPECT_NEAR(v, 1.0 / 7.0, 1e-15);
}

TEST(ResponseMarginalTest, PointMassGivesColumn) {
  const TransitionMatrix g = BuildTransitionMatrix(PrefixSpec(5, 2, 1.0, 0.9));
  const ProbVector h = ResponseMarginal(g, ProbVector({1.0, 0.0, 0.0, 0.0, 0.0}));
  for (int y = 0; y < 5; ++y) EXPECT_EQ(h[y], g(y, 0));
}

TEST(ResponseMarginalTest, RandomInputsSumToOne) {
  Rng rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const int k_total = 2 + trial % 15;
    const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 0.5), rng);
    const TransitionMatrix g =
        BuildTransitionMatrix(PrefixSpec(k_total, trial % k_total, 0.5 + trial % 4, 0.9));
    const Eigen::Map<const Eigen::VectorXd> th(theta.values().data(), k_total);
    const Eigen::VectorXd raw = g.probs() * th;
    EXPECT_NEAR(raw.sum(), 1.0, 1e-12);
    EXPECT_EQ(ResponseMarginal(g, theta).size(), k_total);
  }
  EXPECT_THROW(ResponseMarginal(BuildTransitionMatrix(MechanismSpec::Srr(3, 1.0)),
                                ProbVector::Uniform(4)),
               std::invalid_argument);
}

}  // namespace
}  // namespace adaptive_ldp
