// Copyright 2026 The cranfl Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

// Seeded random streams. Every stochastic component takes an explicit Rng;
// independent streams are derived from a base seed plus stream labels so that
// results do not depend on scheduling.

#ifndef CRANFL_RANDOM_HPP
#define CRANFL_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cranfl {

using Rng = std::mt19937_64;

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(base),
                                   static_cast<std::uint32_t>(base >> 32)};
  for (std::uint64_t l : labels) {
    words.push_back(static_cast<std::uint32_t>(l));
    words.push_back(static_cast<std::uint32_t>(l >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> labels) {
  return Rng(derive_seed(base, labels));
}

}  // namespace cranfl

#endif  // CRANFL_RANDOM_HPP
