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

#include "cranfl/energy.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cranfl/convergence.hpp"
#include "cranfl/error.hpp"

namespace cranfl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double device_power(const Scenario& scn, const Allocation& alloc, int k) {
  double p = 0.0;
  for (int n : scn.sc_map[k]) p += alloc.power(k, n);
  return p;
}

double device_bits_at(const Scenario& scn, const Allocation& alloc, int k, int m) {
  double c = 0.0;
  for (int n : scn.sc_map[k]) c += alloc.bits(m, n);
  return c;
}

}  // namespace

std::vector<int> all_devices(const Scenario& scn) {
  std::vector<int> ks(scn.K);
  std::iota(ks.begin(), ks.end(), 0);
  return ks;
}

double upload_latency(const Scenario& scn, const ChannelRealization& ch,
                      const Allocation& alloc, int k) {
  const double bits = payload_bits(scn.chip_for(k), alloc.c_prec);
  const double rate = device_rate(scn, ch, alloc, k);
  if (bits == 0.0) return 0.0;
  if (!(rate > 0.0)) return kInf;
  return bits / rate;
}

double fronthaul_rate(const Scenario& scn, const Allocation& alloc, int m) {
  double bits = 0.0;
  for (int n = 0; n < scn.N; ++n) bits += alloc.bits(m, n);
  return 2.0 * scn.bandwidth_hz * bits / scn.N;
}

double fronthaul_latency(const Scenario& scn, const Allocation& alloc, int k, int m) {
  const double bits = payload_bits(scn.chip_for(k), alloc.c_prec);
  if (bits == 0.0) return 0.0;
  const double g = fronthaul_rate(scn, alloc, m);
  if (!(g > 0.0)) return kInf;
  return 2.0 * bits * device_bits_at(scn, alloc, k, m) / g;
}

TransmissionEnergy e_trans_breakdown(const Scenario& scn, const ChannelRealization& ch,
                                     const Allocation& alloc, std::span<const int> devices) {
  TransmissionEnergy e;
  e.per_device.assign(scn.K, 0.0);
  e.per_rrh.assign(scn.M, 0.0);
  for (int k : devices) {
    const double t = upload_latency(scn, ch, alloc, k);
    if (!std::isfinite(t)) {
      throw Infeasible("e_trans_round: device " + std::to_string(k) + " has zero rate");
    }
    e.per_device[k] = t * device_power(scn, alloc, k);
    e.device_j += e.per_device[k];
  }
  for (int m = 0; m < scn.M; ++m) {
    const double rrh_power = fronthaul_rate(scn, alloc, m) * scn.p_fl[m];
    double latency = 0.0;
    for (int k : devices) {
      const double t = fronthaul_latency(scn, alloc, k, m);
      if (!std::isfinite(t)) {
        throw Infeasible("e_trans_round: RRH " + std::to_string(m) + " forwards at zero rate");
      }
      latency += t;
    }
    e.per_rrh[m] = latency * rrh_power;
    e.fronthaul_j += e.per_rrh[m];
  }
  return e;
}

double e_trans_round(const Scenario& scn, const ChannelRealization& ch,
                     const Allocation& alloc, std::span<const int> devices) {
  return e_trans_breakdown(scn, ch, alloc, devices).total();
}

double fronthaul_energy_direct(const Scenario& scn, const Allocation& alloc,
                               std::span<const int> devices) {
  double e = 0.0;
  for (int m = 0; m < scn.M; ++m) {
    for (int k : devices) {
      e += 2.0 * payload_bits(scn.chip_for(k), alloc.c_prec) *
           device_bits_at(scn, alloc, k, m) * scn.p_fl[m];
    }
  }
  return e;
}

EnergyReport expected_total_energy(const Scenario& scn, const ChannelRealization& ch,
                                   const Allocation& alloc) {
  const double T = rounds_for_accuracy(scn.conv, alloc.c_prec);
  if (!(T > 0.0)) {
    throw AccuracyUnreachable("expected_total_energy: bound gives T = " +
                              std::to_string(T) + " rounds for eps_target = " +
                              std::to_string(scn.conv.eps_target));
  }
  const double participation = static_cast<double>(scn.conv.K_bar) / scn.conv.K;

  double compute = 0.0;
  for (int k = 0; k < scn.K; ++k) compute += e_compute_round(alloc.c_prec, scn.chip_for(k), 1);

  const auto devices = all_devices(scn);
  const TransmissionEnergy trans = e_trans_breakdown(scn, ch, alloc, devices);

  EnergyReport r;
  r.c_prec = alloc.c_prec;
  r.rounds_T = T;
  r.e_compute_per_round = participation * compute;
  r.e_device_tx_per_round = participation * trans.device_j;
  r.e_fronthaul_per_round = participation * trans.fronthaul_j;
  r.device_tx_per_round.reserve(scn.K);
  for (double v : trans.per_device) r.device_tx_per_round.push_back(participation * v);
  r.fronthaul_per_round.reserve(scn.M);
  for (double v : trans.per_rrh) r.fronthaul_per_round.push_back(participation * v);
  r.total = T * r.per_round();
  return r;
}

}  // namespace cranfl
