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

// Per-round communication energy over the Cloud-RAN and the expected total
// energy to reach the accuracy target.

#ifndef CRANFL_ENERGY_HPP
#define CRANFL_ENERGY_HPP

#include <span>
#include <vector>

#include "cranfl/channel.hpp"
#include "cranfl/compute_energy.hpp"

namespace cranfl {

/// Wireless upload time of device k. +infinity when its rate is zero.
double upload_latency(const Scenario& scn, const ChannelRealization& ch,
                      const Allocation& alloc, int k);

/// 2 * payload * C_{m,k} / G_m with C_{m,k} summed over the device's SCs.
/// +infinity when RRH m forwards at zero rate.
double fronthaul_latency(const Scenario& scn, const Allocation& alloc, int k, int m);

/// G_m = sum_n 2 B C_{m,n} / N.
double fronthaul_rate(const Scenario& scn, const Allocation& alloc, int m);

struct TransmissionEnergy {
  double device_j = 0.0;
  double fronthaul_j = 0.0;
  std::vector<double> per_device;  // indexed by device
  std::vector<double> per_rrh;     // indexed by RRH

  double total() const { return device_j + fronthaul_j; }
};

/// Energy of one round in which `devices` upload. Throws Infeasible when a
/// participating device or RRH has infinite latency.
TransmissionEnergy e_trans_breakdown(const Scenario& scn, const ChannelRealization& ch,
                                     const Allocation& alloc, std::span<const int> devices);

double e_trans_round(const Scenario& scn, const ChannelRealization& ch,
                     const Allocation& alloc, std::span<const int> devices);

/// Closed form of the RRH energy after the fronthaul rate cancels:
/// sum_m sum_k 2 * payload_k * C_{m,k} * P_fl,m.
double fronthaul_energy_direct(const Scenario& scn, const Allocation& alloc,
                               std::span<const int> devices);

/// Expected energy of a training run. The per-round fields already carry the
/// K_bar / K participation factor, so total = rounds_T * (compute + device_tx
/// + fronthaul).
struct EnergyReport {
  int c_prec = 0;
  double rounds_T = 0.0;
  double e_compute_per_round = 0.0;
  double e_device_tx_per_round = 0.0;
  double e_fronthaul_per_round = 0.0;
  double total = 0.0;
  std::vector<double> device_tx_per_round;  // by device
  std::vector<double> fronthaul_per_round;  // by RRH

  double per_round() const {
    return e_compute_per_round + e_device_tx_per_round + e_fronthaul_per_round;
  }
};

/// Throws AccuracyUnreachable when the convergence bound yields T <= 0.
EnergyReport expected_total_energy(const Scenario& scn, const ChannelRealization& ch,
                                   const Allocation& alloc);

std::vector<int> all_devices(const Scenario& scn);

}  // namespace cranfl

#endif  // CRANFL_ENERGY_HPP
