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

#include <cmath>
#include <numeric>
#include <vector>

#include "cranfl/channel.hpp"
#include "cranfl/error.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cranfl;
using cranfl::testing::fixed_channel;
using cranfl::testing::small_scenario;

TEST_CASE("unit conversion") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dbm_to_watt(23.0) == doctest::Approx(0.19952623149688797).epsilon(1e-14));
}

TEST_CASE("default scenario") {
  const Scenario s = Scenario::defaults();
  CHECK_NOTHROW(s.validate());
  CHECK(s.K == 16);
  CHECK(s.M == 5);
  CHECK(s.N == 64);
  CHECK(s.bit_budget(0) == 128);
  CHECK(s.noise(2, 7) == doctest::Approx(1e-3 * std::pow(10.0, -17.4) * 300e6 / 64).epsilon(1e-12));
  for (int k = 0; k < s.K; ++k) {
    CHECK(s.sc_map[k].size() == 4u);
    for (int n : s.sc_map[k]) CHECK(s.owner(n) == k);
  }
}

TEST_CASE("subcarrier map needs K to divide N") {
  CHECK_THROWS_AS(equal_sc_map(5, 64), InvalidInput);
  const auto map = equal_sc_map(2, 6);
  CHECK(map[0] == std::vector<int>{0, 1, 2});
  CHECK(map[1] == std::vector<int>{3, 4, 5});
}

TEST_CASE("equal allocation") {
  const Scenario s = Scenario::defaults();
  const Allocation a = equal_allocation(s, 16);
  CHECK(check_feasible(s, a).empty());
  CHECK(a.power(3, s.sc_map[3][0]) == doctest::Approx(s.p_bar[3] / 4));
  CHECK(a.power(3, s.sc_map[4][0]) == 0.0);
  CHECK(a.bits(4, 63) == 2);

  Scenario tight = small_scenario(2, 1, 4, 3);
  CHECK_THROWS_AS(equal_allocation(tight, 16), Infeasible);
}

TEST_CASE("feasibility check names the violation") {
  const Scenario s = small_scenario(2, 2, 4, 8);
  Allocation a = equal_allocation(s, 8);
  CHECK(check_feasible(s, a).empty());
  a.bits(1, 0) = 6;
  CHECK(check_feasible(s, a).find("RRH 1") != std::string::npos);
  a = equal_allocation(s, 8);
  a.power(0, 0) *= 3.0;
  CHECK(check_feasible(s, a).find("device 0") != std::string::npos);
  a = equal_allocation(s, 8);
  a.power(0, 3) = 0.01;
  CHECK(!check_feasible(s, a).empty());
  a = equal_allocation(s, 8);
  a.bits(0, 2) = 0;
  CHECK(!check_feasible(s, a).empty());
}

TEST_CASE("fronthaul noise and SINR") {
  CHECK(fronthaul_noise_var({1.0, 1.0}, 0.5, 0.25, 2) ==
        doctest::Approx(3.0 * (2.0 * 0.5 + 0.25) / 16.0).epsilon(1e-15));
  CHECK(rrh_sinr(1.0, 1.0, 1.0, 4.0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(rrh_sinr(0.0, 1.0, 1.0, 4.0) == 0.0);
  // Direct form and psi form agree.
  const double g = 3e-9, p = 0.07, s2 = 2e-14;
  for (int c = 1; c <= 20; ++c) {
    const double direct = g * p / (s2 + fronthaul_noise_var({std::sqrt(g), 0.0}, p, s2, c));
    CHECK(rrh_sinr(g, p, s2, std::ldexp(1.0, 2 * c)) == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("rate of a single link") {
  Scenario s = small_scenario(1, 1, 1, 1);
  s.bandwidth_hz = 1.0;
  s.noise_var = {1.0};
  s.p_bar = {1.0};
  const ChannelRealization ch = fixed_channel(s, {1.0});
  Allocation a;
  a.N = 1;
  a.p = {1.0};
  a.c_bits = {1};
  CHECK(rate_per_sc(s, ch, a, 0, 0) == doctest::Approx(0.48542682717024175957).epsilon(1e-14));
  CHECK(device_rate(s, ch, a, 0) == doctest::Approx(0.48542682717024175957).epsilon(1e-14));
  a.p = {0.0};
  CHECK(device_rate(s, ch, a, 0) == 0.0);
}

TEST_CASE("rate grows with bits and power, sums over RRHs") {
  const Scenario s = small_scenario(1, 2, 2, 4);
  const ChannelRealization ch = fixed_channel(s, {1e-9, 2e-9, 3e-9, 5e-10});
  Allocation a = equal_allocation(s, 8);
  double prev = device_rate(s, ch, a, 0);
  for (int c = a.bits(0, 0) + 1; c <= 9; ++c) {
    a.bits(0, 0) = c;
    const double r = device_rate(s, ch, a, 0);
    CHECK(r > prev);
    prev = r;
  }
  Allocation lone = equal_allocation(s, 8);
  const double both = rate_per_sc(s, ch, lone, 0, 0);
  Scenario one = small_scenario(1, 1, 2, 4);
  const ChannelRealization ch1 = fixed_channel(one, {1e-9, 2e-9});
  Allocation a1 = equal_allocation(one, 8);
  CHECK(rate_per_sc(one, ch1, a1, 0, 0) < both);
}

TEST_CASE("topology stays inside the disc and channels match the path loss") {
  const Scenario s = Scenario::defaults();
  Rng rng(9);
  const Topology t = sample_topology(s, rng);
  for (const auto& p : t.devices) CHECK(std::hypot(p.x, p.y) <= s.radius_m);
  for (const auto& p : t.rrhs) CHECK(std::hypot(p.x, p.y) <= s.radius_m);

  CHECK(pathloss_gain(10.0, s) == doctest::Approx(1e-3 * 1e-3).epsilon(1e-12));
  CHECK(pathloss_gain(0.2, s) == pathloss_gain(1.0, s));

  // |h|^2 averages to the path-loss gain.
  Scenario one = small_scenario(1, 1, 1, 4);
  Topology fixed;
  fixed.devices = {Point{0.0, 0.0}};
  fixed.rrhs = {Point{30.0, 40.0}};
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += sample_channels(one, fixed, rng).gain2(0, 0, 0);
  const double expect = pathloss_gain(50.0, one);
  CHECK(std::abs(sum / n - expect) < 4.0 * expect / std::sqrt(n));
}

TEST_CASE("sampling is reproducible") {
  const Scenario s = Scenario::defaults();
  Rng a(77), b(77);
  const auto ta = sample_topology(s, a);
  const auto tb = sample_topology(s, b);
  CHECK(sample_channels(s, ta, a).h == sample_channels(s, tb, b).h);
}
