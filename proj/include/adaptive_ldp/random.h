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

#ifndef ADAPTIVE_LDP_RANDOM_H_
#define ADAPTIVE_LDP_RANDOM_H_

#include <cstdint>
#include <random>

namespace adaptive_ldp {

// Every sampling routine takes one of these explicitly. There is no global
// generator anywhere in the library.
using Rng = std::mt19937_64;

// Child stream for replicate `run` of configuration `config_index` under the
// master `seed`. The words (seed low, seed high, config_index, run) are fed
// through std::seed_seq, whose mixing algorithm is fixed by the standard, so
// streams are reproducible across platforms and independent of how many other
// configurations or runs are scheduled.
inline Rng ChildStream(std::uint64_t seed, std::uint64_t config_index,
                       std::uint64_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(config_index),
                    static_cast<std::uint32_t>(config_index >> 32),
                    static_cast<std::uint32_t>(run),
                    static_cast<std::uint32_t>(run >> 32)};
  return Rng(seq);
}

}  // namespace adaptive_ldp

#endif  // ADAPTIVE_LDP_RANDOM_H_
