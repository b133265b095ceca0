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

#include "adaptive_ldp/validation.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "adaptive_ldp/inference.h"
#include "adaptive_ldp/mechanism.h"
#include "adaptive_ldp/random.h"
#include "adaptive_ldp/simplex.h"
#include "adaptive_ldp/utility.h"

namespace adaptive_ldp {
namespace {

constexpr std::array<double, 4> kEpsilons = {0.1, 0.5, 1.0, 5.0};
constexpr std::array<double, 3> kKappas = {0.5, 0.8, 0.9};

// A uniformly random subset of size k.
SubsetSpec RandomSubset(int num_categories, int k, Rng& rng) {
  std::vector<Category> all(num_categories);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  return SubsetSpec(num_categories, std::move(all));
}

double LogResponseProbability(const std::vector<double>& phi, Category y,
                              const MechanismSpec& spec) {
  const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
  double h = 0.0;
  for (std::size_t x = 0; x < phi.size(); ++x) {
    h += spec.Probability(y, static_cast<Category>(x)) * phi[x] / total;
  }
  return std::log(h);
}

double LogPrior(const std::vector<double>& phi, const DirichletParams& prior) {
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    sum += (prior[i] - 1.0) * std::log(phi[i]) - phi[i];
  }
  return sum;
}

template <typename F>
std::vector<double> CentralDifference(std::vector<double> x, double step, F f) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = f(x);
    x[i] = saved - step;
    const double down = f(x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double RelativeError(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    norm += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300);
}

}  // namespace

CheckResult CheckLdpGrid() {
  CheckResult result{"ldp-grid", true, ""};
  int matrices = 0;
  double worst_slack = -1.0;
  for (int k_total : {2, 3, 5, 10, 20}) {
    for (double eps : kEpsilons) {
      for (double kappa : kKappas) {
        for (int k = 0; k < k_total; ++k) {
          std::vector<Category> members(k);
          std::iota(members.begin(), members.end(), 0);
          const MechanismSpec spec(SubsetSpec(k_total, std::move(members)), eps, kappa);
          const LdpReport report = VerifyLdp(BuildTransitionMatrix(spec), eps);
          ++matrices;
          worst_slack = std::max(worst_slack, report.max_log_ratio / eps);
          if (!report.certified && result.passed) {
            result.passed = false;
            std::ostringstream msg;
            msg << "K=" << k_total << " eps=" << eps << " kappa=" << kappa << " k=" << k
                << " max log-ratio " << report.max_log_ratio;
            result.detail = msg.str();
          }
        }
      }
    }
  }
  if (result.passed) {
    std::ostringstream msg;
    msg << matrices << " matrices certified, worst ratio/eps " << worst_slack;
    result.detail = msg.str();
  }
  return result;
}

CheckResult CheckGradients(std::uint64_t seed, int count) {
  constexpr double kStep = 1e-6;
  constexpr double kTolerance = 1e-5;
  Rng rng(seed);
  std::uniform_real_distribution<double> phi_dist(0.2, 3.0);
  std::uniform_real_distribution<double> shape_dist(0.3, 3.0);
  const std::array<int, 4> sizes = {2, 5, 10, 20};
  double worst = 0.0;
  for (int c = 0; c < count; ++c) {
    const int k_total = sizes[c % sizes.size()];
    std::vector<double> phi(k_total);
    std::vector<double> shapes(k_total);
    for (int i = 0; i < k_total; ++i) {
      phi[i] = phi_dist(rng);
      shapes[i] = shape_dist(rng);
    }
    const DirichletParams prior(shapes);
    const GammaState state(phi, prior);
    const double eps = kEpsilons[c % kEpsilons.size()];
    const double kappa = kKappas[c % kKappas.size()];
    const int k = std::uniform_int_distribution<int>(0, k_total - 1)(rng);
    const MechanismSpec spec(RandomSubset(k_total, k, rng), eps, kappa);
    const Category y = std::uniform_int_distribution<int>(0, k_total - 1)(rng);

    const auto fd_prior =
        CentralDifference(phi, kStep, [&](const auto& p) { return LogPrior(p, prior); });
    const auto fd_like = CentralDifference(
        phi, kStep, [&](const auto& p) { return LogResponseProbability(p, y, spec); });
    worst = std::max({worst, RelativeError(GradLogPrior(state), fd_prior),
                      RelativeError(GradLogLikelihood(state, y, spec), fd_like)});
  }
  std::ostringstream msg;
  msg << count << " configurations, worst relative error " << worst;
  return {"gradients", worst < kTolerance, msg.str()};
}

CheckResult CheckPrefixOptimality(std::uint64_t seed, int per_k) {
  Rng rng(seed);
  int cases = 0;
  for (int k_total = 2; k_total <= 8; ++k_total) {
    for (int rep = 0; rep < per_k; ++rep, ++cases) {
      const ProbVector theta = SampleDirichlet(DirichletParams::Symmetric(k_total, 1.0), rng);
      const double eps = kEpsilons[rep % kEpsilons.size()];
      const double kappa = kKappas[rep % kKappas.size()];
      double brute = kDisqualified;
      for (unsigned mask = 0; mask + 1 < (1u << k_total); ++mask) {
        std::vector<Category> members;
        for (int i = 0; i < k_total; ++i) {
          if (mask & (1u << i)) members.push_back(i);
        }
        const MechanismSpec spec(SubsetSpec(k_total, std::move(members)), eps, kappa);
        brute = std::max(brute, UtilityHonestResponse(theta, spec));
      }
      const SortPermutation order = SortDescending(theta);
      double prefix = kDisqualified;
      for (int k = 0; k < k_total; ++k) {
        const MechanismSpec spec(SubsetSpec::Prefix(order, k), eps, kappa);
        prefix = std::max(prefix, UtilityHonestResponse(theta, spec));
      }
      if (prefix != brute) {
        std::ostringstream msg;
        msg << "K=" << k_total << " case " << rep << ": prefix max " << prefix
            << " != subset max " << brute;
        return {"prefix-optimality", false, msg.str()};
      }
    }
  }
  return {"prefix-optimality", true, std::to_string(cases) + " thetas, values equal"};
}

CheckResult CheckFisherPositiveDefinite(std::uint64_t seed, int count) {
  Rng rng(seed);
  double min_eigen = std::numeric_limits<double>::infinity();
  for (int c = 0; c < count; ++c) {
    const int k_total = std::uniform_int_distribution<int>(2, 20)(rng);
    const ProbVector dirichlet = SampleDirichlet(DirichletParams::Symmetric(k_total, 1.0), rng);
    std::vector<double> mixed(k_total);
    for (int i = 0; i < k_total; ++i) mixed[i] = 0.9 * dirichlet[i] + 0.1 / k_total;
    const ProbVector theta(std::move(mixed));
    const double eps = kEpsilons[c % kEpsilons.size()];
    const double kappa = kKappas[c % kKappas.size()];
    const int k = std::uniform_int_distribution<int>(0, k_total - 1)(rng);
    const MechanismSpec spec(RandomSubset(k_total, k, rng), eps, kappa);
    const Eigen::MatrixXd f = ComputeFisherMatrix(theta, spec).matrix;
    const double asymmetry = (f - f.transpose()).cwiseAbs().maxCoeff();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(f);
    const double smallest = solver.eigenvalues().minCoeff();
    min_eigen = std::min(min_eigen, smallest);
    if (asymmetry > 1e-10 || !(smallest > 0.0)) {
      std::ostringstream msg;
      msg << "K=" << k_total << " eps=" << eps << " kappa=" << kappa << " k=" << k
          << ": asymmetry " << asymmetry << ", min eigenvalue " << smallest;
      return {"fisher-spd", false, msg.str()};
    }
  }
  std::ostringstream msg;
  msg << count << " pairs, smallest eigenvalue " << min_eigen;
  return {"fisher-spd", true, msg.str()};
}

std::vector<CheckResult> RunValidationSuite(std::uint64_t seed) {
  return {CheckLdpGrid(), CheckGradients(seed), CheckPrefixOptimality(seed + 1),
          CheckFisherPositiveDefinite(seed + 2)};
}

}  // namespace adaptive_ldp
