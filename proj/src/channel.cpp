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

#include "cranfl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cranfl/error.hpp"

namespace cranfl {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<std::vector<int>> equal_sc_map(int K, int N) {
  if (K < 1 || N < 1 || N % K != 0) {
    throw InvalidInput("equal_sc_map: K = " + std::to_string(K) +
                       " does not divide N = " + std::to_string(N));
  }
  const int per = N / K;
  std::vector<std::vector<int>> map(K);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < per; ++j) map[k].push_back(k * per + j);
  }
  return map;
}

Scenario Scenario::defaults() {
  Scenario s;
  const double sc_bandwidth = s.bandwidth_hz / s.N;
  const double noise = dbm_to_watt(-174.0) * sc_bandwidth;
  s.noise_var.assign(static_cast<std::size_t>(s.M) * s.N, noise);
  s.p_bar.assign(s.K, dbm_to_watt(23.0));
  s.g_bar.assign(s.M, 1.2e9);
  s.p_fl.assign(s.M, 1e-10);
  s.sc_map = equal_sc_map(s.K, s.N);
  s.conv.K = s.K;
  s.conv.sigma_k.assign(s.K, 1.0);
  s.conv.d = s.chip.n_weights;
  s.conv.I = s.chip.local_steps;
  return s;
}

const ChipModel& Scenario::chip_for(int k) const {
  return device_chips.empty() ? chip : device_chips[k];
}

int Scenario::bit_budget(int m) const {
  return static_cast<int>(std::floor(N * g_bar[m] / (2.0 * bandwidth_hz)));
}

int Scenario::owner(int n) const {
  for (int k = 0; k < static_cast<int>(sc_map.size()); ++k) {
    for (int j : sc_map[k]) {
      if (j == n) return k;
    }
  }
  return -1;
}

void Scenario::validate() const {
  if (K < 1 || M < 1 || N < 1) throw InvalidInput("scenario: K, M, N must be >= 1");
  if (!(bandwidth_hz > 0.0)) throw InvalidInput("scenario: bandwidth must be positive");
  if (radius_m < 0.0) throw InvalidInput("scenario: radius must be >= 0");
  if (noise_var.size() != static_cast<std::size_t>(M) * N) {
    throw InvalidInput("scenario: noise_var must have M * N entries");
  }
  for (double v : noise_var) {
    if (!(v > 0.0)) throw InvalidInput("scenario: noise variances must be positive");
  }
  if (static_cast<int>(p_bar.size()) != K) throw InvalidInput("scenario: p_bar must have K entries");
  if (static_cast<int>(g_bar.size()) != M) throw InvalidInput("scenario: g_bar must have M entries");
  if (static_cast<int>(p_fl.size()) != M) throw InvalidInput("scenario: p_fl must have M entries");
  for (double v : p_bar) {
    if (!(v > 0.0)) throw InvalidInput("scenario: power budgets must be positive");
  }
  for (double v : g_bar) {
    if (!(v > 0.0)) throw InvalidInput("scenario: fronthaul capacities must be positive");
  }
  for (double v : p_fl) {
    if (!(v >= 0.0)) throw InvalidInput("scenario: p_fl must be non-negative");
  }

  if (static_cast<int>(sc_map.size()) != K) throw InvalidInput("scenario: sc_map must have K entries");
  std::vector<int> seen(N, 0);
  for (const auto& sc : sc_map) {
    if (sc.empty()) throw InvalidInput("scenario: every device needs at least one subcarrier");
    for (int n : sc) {
      if (n < 0 || n >= N) throw InvalidInput("scenario: subcarrier index out of range");
      ++seen[n];
    }
  }
  for (int n = 0; n < N; ++n) {
    if (seen[n] != 1) {
      throw InvalidInput("scenario: sc_map is not a partition (subcarrier " +
                         std::to_string(n) + ")");
    }
  }

  chip.validate();
  if (!device_chips.empty()) {
    if (static_cast<int>(device_chips.size()) != K) {
      throw InvalidInput("scenario: device_chips must be empty or have K entries");
    }
    for (const auto& c : device_chips) c.validate();
  }
  conv.validate();
  if (conv.K != K) throw InvalidInput("scenario: convergence K differs from device count");
  if (conv.I != chip.local_steps) {
    throw InvalidInput("scenario: convergence I differs from chip local_steps");
  }
}

Allocation equal_allocation(const Scenario& scn, int c_prec) {
  Allocation a;
  a.N = scn.N;
  a.c_prec = c_prec;
  a.p.assign(static_cast<std::size_t>(scn.K) * scn.N, 0.0);
  for (int k = 0; k < scn.K; ++k) {
    const double share = scn.p_bar[k] / static_cast<double>(scn.sc_map[k].size());
    for (int n : scn.sc_map[k]) a.power(k, n) = share;
  }
  a.c_bits.assign(static_cast<std::size_t>(scn.M) * scn.N, 1);
  for (int m = 0; m < scn.M; ++m) {
    const int per = scn.bit_budget(m) / scn.N;
    if (per < 1) {
      throw Infeasible("RRH " + std::to_string(m) +
                       ": at least 1 bit per SC unsatisfiable with budget " +
                       std::to_string(scn.bit_budget(m)));
    }
    for (int n = 0; n < scn.N; ++n) a.bits(m, n) = per;
  }
  return a;
}

std::string check_feasible(const Scenario& scn, const Allocation& alloc) {
  if (alloc.N != scn.N ||
      alloc.p.size() != static_cast<std::size_t>(scn.K) * scn.N ||
      alloc.c_bits.size() != static_cast<std::size_t>(scn.M) * scn.N) {
    return "allocation dimensions do not match scenario";
  }
  if (alloc.c_prec < 1 || alloc.c_prec > scn.chip.c_max) return "c_prec outside [1, C_max]";
  for (int k = 0; k < scn.K; ++k) {
    double total = 0.0;
    for (int n = 0; n < scn.N; ++n) {
      const double p = alloc.power(k, n);
      if (!(p >= 0.0) || !std::isfinite(p)) return "negative or non-finite power";
      if (p > 0.0 && scn.owner(n) != k) return "power on a subcarrier the device does not own";
      total += p;
    }
    if (total > scn.p_bar[k] * (1.0 + 1e-12)) {
      return "device " + std::to_string(k) + " exceeds its power budget";
    }
  }
  for (int m = 0; m < scn.M; ++m) {
    long total = 0;
    for (int n = 0; n < scn.N; ++n) {
      if (alloc.bits(m, n) < 1) return "fronthaul bits below 1";
      total += alloc.bits(m, n);
    }
    if (total > scn.bit_budget(m)) {
      return "RRH " + std::to_string(m) + " exceeds its fronthaul bit budget";
    }
  }
  return {};
}

Topology sample_topology(const Scenario& scn, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    const double r = scn.radius_m * std::sqrt(u(rng));
    const double theta = 2.0 * std::numbers::pi * u(rng);
    return Point{r * std::cos(theta), r * std::sin(theta)};
  };
  Topology t;
  t.devices.reserve(scn.K);
  t.rrhs.reserve(scn.M);
  for (int k = 0; k < scn.K; ++k) t.devices.push_back(draw());
  for (int m = 0; m < scn.M; ++m) t.rrhs.push_back(draw());
  return t;
}

double pathloss_gain(double d, const Scenario& scn) {
  const double dd = std::max(d, 1.0);
  return std::pow(10.0, -scn.pathloss_ref_db / 10.0) * std::pow(dd, -scn.pathloss_exp);
}

ChannelRealization sample_channels(const Scenario& scn, const Topology& positions,
                                   Rng& rng) {
  if (static_cast<int>(positions.devices.size()) != scn.K ||
      static_cast<int>(positions.rrhs.size()) != scn.M) {
    throw InvalidInput("sample_channels: topology does not match scenario");
  }
  ChannelRealization ch;
  ch.M = scn.M;
  ch.K = scn.K;
  ch.N = scn.N;
  ch.positions = positions;
  ch.h.resize(static_cast<std::size_t>(scn.M) * scn.K * scn.N);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (int m = 0; m < scn.M; ++m) {
    for (int k = 0; k < scn.K; ++k) {
      const double amp =
          std::sqrt(pathloss_gain(distance(positions.rrhs[m], positions.devices[k]), scn));
      for (int n = 0; n < scn.N; ++n) {
        const double re = normal(rng);
        const double im = normal(rng);
        ch.h[ch.index(m, k, n)] = amp * std::complex<double>(re, im);
      }
    }
  }
  return ch;
}

double fronthaul_noise_var(std::complex<double> h, double p, double sigma2,
                           int c_bits) {
  return 3.0 * (std::norm(h) * p + sigma2) * std::ldexp(1.0, -2 * c_bits);
}

double rrh_sinr(double gain2, double p, double sigma2, double psi) {
  const double signal = gain2 * p;
  if (signal == 0.0) return 0.0;
  return signal * psi / (sigma2 * psi + 3.0 * (signal + sigma2));
}

double rate_per_sc(const Scenario& scn, const ChannelRealization& ch,
                   const Allocation& alloc, int k, int n) {
  const double p = alloc.power(k, n);
  if (p == 0.0) return 0.0;
  double sinr = 0.0;
  for (int m = 0; m < scn.M; ++m) {
    const double g = ch.gain2(m, k, n);
    const double sigma2 = scn.noise(m, n);
    const double q = fronthaul_noise_var(ch.at(m, k, n), p, sigma2, alloc.bits(m, n));
    sinr += g * p / (sigma2 + q);
  }
  return scn.bandwidth_hz / scn.N * std::log2(1.0 + sinr);
}

double device_rate(const Scenario& scn, const ChannelRealization& ch,
                   const Allocation& alloc, int k) {
  double r = 0.0;
  for (int n : scn.sc_map[k]) r += rate_per_sc(scn, ch, alloc, k, n);
  return r;
}

}  // namespace cranfl
