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

// Small hand-built scenarios shared by the unit tests.

#ifndef CRANFL_TESTS_HELPERS_HPP
#define CRANFL_TESTS_HELPERS_HPP

#include <complex>
#include <vector>

#include "cranfl/channel.hpp"

namespace cranfl::testing {

/// K devices, M RRHs, N subcarriers, fronthaul budget of `bits` per RRH.
inline Scenario small_scenario(int K, int M, int N, int bits) {
  Scenario s = Scenario::defaults();
  s.K = K;
  s.M = M;
  s.N = N;
  s.noise_var.assign(static_cast<std::size_t>(M) * N,
                     dbm_to_watt(-174.0) * s.bandwidth_hz / N);
  s.p_bar.assign(K, dbm_to_watt(23.0));
  s.g_bar.assign(M, 2.0 * s.bandwidth_hz * bits / N);
  s.p_fl.assign(M, 1e-10);
  s.sc_map = equal_sc_map(K, N);
  s.conv.K = K;
  s.conv.K_bar = K < s.conv.K_bar ? K : s.conv.K_bar;
  s.conv.sigma_k.assign(K, 1.0);
  return s;
}

/// Channel with |h_{m,k,n}|^2 = gains[(m * K + k) * N + n] and zero phase.
inline ChannelRealization fixed_channel(const Scenario& s, const std::vector<double>& gains) {
  ChannelRealization ch;
  ch.M = s.M;
  ch.K = s.K;
  ch.N = s.N;
  ch.positions.devices.resize(s.K);
  ch.positions.rrhs.resize(s.M);
  for (double g : gains) ch.h.emplace_back(std::sqrt(g), 0.0);
  return ch;
}

inline ChannelRealization random_channel(const Scenario& s, Rng& rng) {
  const Topology t = sample_topology(s, rng);
  return sample_channels(s, t, rng);
}

}  // namespace cranfl::testing

#endif  // CRANFL_TESTS_HELPERS_HPP
