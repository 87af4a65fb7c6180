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

// Cloud-RAN topology, Rayleigh channels, and the quantize-and-forward rate
// model: each RRH uniformly quantizes its received I/Q baseband symbol with
// C_{m,n} bits per dimension before forwarding it over a capacity-limited
// fronthaul link.

#ifndef CRANFL_CHANNEL_HPP
#define CRANFL_CHANNEL_HPP

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "cranfl/compute_energy.hpp"
#include "cranfl/convergence.hpp"
#include "cranfl/quantization.hpp"

namespace cranfl {

double dbm_to_watt(double dbm);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

/// Contiguous equal split of N subcarriers over K devices. Throws InvalidInput
/// when K does not divide N.
std::vector<std::vector<int>> equal_sc_map(int K, int N);

struct Scenario {
  int K = 16;
  int M = 5;
  int N = 64;
  double bandwidth_hz = 300e6;
  double radius_m = 500.0;
  double pathloss_ref_db = 30.0;  // T0 at d0 = 1 m
  double pathloss_exp = 3.0;
  std::vector<double> noise_var;  // (m, n) row-major, W
  std::vector<double> p_bar;      // per device, W
  std::vector<double> g_bar;      // per RRH, bit/s
  std::vector<double> p_fl;       // per RRH, W per bit/s
  std::vector<std::vector<int>> sc_map;
  ChipModel chip;
  std::vector<ChipModel> device_chips;  // empty: every device uses `chip`
  ConvergenceConstants conv;

  /// Paper-scale defaults: K = 16, M = 5, N = 64, B = 300 MHz, R = 500 m,
  /// 23 dBm budgets, thermal noise at -174 dBm/Hz over one subcarrier.
  static Scenario defaults();

  double noise(int m, int n) const { return noise_var[static_cast<std::size_t>(m) * N + n]; }
  const ChipModel& chip_for(int k) const;
  /// floor(N * G_bar_m / (2 B)): integer fronthaul bit budget of RRH m.
  int bit_budget(int m) const;
  /// Device owning subcarrier n, or -1.
  int owner(int n) const;

  /// Throws InvalidInput naming the first violated invariant.
  void validate() const;
};

struct Topology {
  std::vector<Point> devices;
  std::vector<Point> rrhs;
};

struct ChannelRealization {
  int M = 0;
  int K = 0;
  int N = 0;
  std::vector<std::complex<double>> h;  // (m, k, n) row-major
  Topology positions;

  std::size_t index(int m, int k, int n) const {
    return (static_cast<std::size_t>(m) * K + k) * N + n;
  }
  std::complex<double> at(int m, int k, int n) const { return h[index(m, k, n)]; }
  double gain2(int m, int k, int n) const { return std::norm(h[index(m, k, n)]); }
};

struct Allocation {
  std::vector<double> p;    // (k, n) row-major, W; zero off the device's SCs
  std::vector<int> c_bits;  // (m, n) row-major
  int c_prec = 16;
  int N = 0;

  double power(int k, int n) const { return p[static_cast<std::size_t>(k) * N + n]; }
  double& power(int k, int n) { return p[static_cast<std::size_t>(k) * N + n]; }
  int bits(int m, int n) const { return c_bits[static_cast<std::size_t>(m) * N + n]; }
  int& bits(int m, int n) { return c_bits[static_cast<std::size_t>(m) * N + n]; }
};

/// Equal power P_bar_k / |Omega_k| per SC and floor(C_bar_m / N) bits per SC.
/// Throws Infeasible when some C_bar_m < N.
Allocation equal_allocation(const Scenario& scn, int c_prec);

/// Empty string when feasible, otherwise the first violated constraint.
std::string check_feasible(const Scenario& scn, const Allocation& alloc);

Topology sample_topology(const Scenario& scn, Rng& rng);

/// 10^(-T0/10) * d^(-alpha). Distances below 1 m are clamped to 1 m.
double pathloss_gain(double d, const Scenario& scn);

ChannelRealization sample_channels(const Scenario& scn, const Topology& positions,
                                   Rng& rng);

/// 3 (|h|^2 p + sigma^2) 2^(-2 c_bits).
double fronthaul_noise_var(std::complex<double> h, double p, double sigma2,
                           int c_bits);

/// Per-RRH SINR contribution with psi = 2^(2 C) treated as continuous:
/// g p psi / (sigma^2 psi + 3 (g p + sigma^2)).
double rrh_sinr(double gain2, double p, double sigma2, double psi);

double rate_per_sc(const Scenario& scn, const ChannelRealization& ch,
                   const Allocation& alloc, int k, int n);

double device_rate(const Scenario& scn, const ChannelRealization& ch,
                   const Allocation& alloc, int k);

}  // namespace cranfl

#endif  // CRANFL_CHANNEL_HPP
