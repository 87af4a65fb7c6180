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

#include <limits>

#include "cranfl/error.hpp"
#include "cranfl/optimizer.hpp"

namespace cranfl {

std::vector<double> precision_profile(const Scenario& scn, const ChannelRealization& ch,
                                      const Allocation& alloc) {
  std::vector<double> f(scn.chip.c_max, std::numeric_limits<double>::infinity());
  Allocation trial = alloc;
  for (int c = 1; c <= scn.chip.c_max; ++c) {
    trial.c_prec = c;
    try {
      f[c - 1] = expected_total_energy(scn, ch, trial).total;
    } catch (const AccuracyUnreachable&) {
    }
  }
  return f;
}

int optimize_precision(const Scenario& scn, const ChannelRealization& ch,
                       const Allocation& alloc) {
  const auto f = precision_profile(scn, ch, alloc);
  int best = 0;
  for (int i = 1; i < static_cast<int>(f.size()); ++i) {
    if (f[i] < f[best]) best = i;
  }
  if (f.empty() || f[best] == std::numeric_limits<double>::infinity()) {
    throw AccuracyUnreachable("optimize_precision: no precision reaches eps_target");
  }
  return best + 1;
}

}  // namespace cranfl
