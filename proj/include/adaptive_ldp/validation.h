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

// Self-checks run by `adaptive_ldp validate`.

#ifndef ADAPTIVE_LDP_VALIDATION_H_
#define ADAPTIVE_LDP_VALIDATION_H_

#include <cstdint>
#include <string>
#include <vector>

namespace adaptive_ldp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// verify_ldp over K in {2,3,5,10,20}, eps in {0.1,0.5,1,5}, kappa in
// {0.5,0.8,0.9} and every subset size.
CheckResult CheckLdpGrid();

// Prior and likelihood gradients against central differences (step 1e-6) on
// `count` random configurations; passes when every relative error < 1e-5.
CheckResult CheckGradients(std::uint64_t seed, int count = 100);

// For K = 2..8 and `per_k` random thetas, the best prefix subset attains the
// best honest-response probability over all 2^K - 1 proper subsets.
CheckResult CheckPrefixOptimality(std::uint64_t seed, int per_k = 50);

// Fisher matrices of `count` random (theta, mechanism) pairs are symmetric
// positive definite.
CheckResult CheckFisherPositiveDefinite(std::uint64_t seed, int count = 200);

std::vector<CheckResult> RunValidationSuite(std::uint64_t seed);

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_VALIDATION_H_
