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

#include "cranfl/compute_energy.hpp"

#include <cmath>
#include <string>

#include "cranfl/error.hpp"

namespace cranfl {

void ChipModel::validate() const {
  if (!(energy_const > 0.0)) throw InvalidInput("chip: A must be positive");
  if (!(alpha > 1.0 && alpha < 2.0)) throw InvalidInput("chip: alpha must lie in (1, 2)");
  if (c_max < 1) throw InvalidInput("chip: c_max must be >= 1");
  if (!(parallelism > 0.0)) throw InvalidInput("chip: u must be positive");
  if (n_mac < 0.0 || n_weights < 0.0 || n_outputs < 0.0) {
    throw InvalidInput("chip: operation counts must be non-negative");
  }
  if (local_steps < 1) throw InvalidInput("chip: local_steps must be >= 1");
}

double e_mac(int c_prec, const ChipModel& chip) {
  if (c_prec < 1 || c_prec > chip.c_max) {
    throw DomainError("e_mac: precision " + std::to_string(c_prec) +
                      " outside [1, " + std::to_string(chip.c_max) + "]");
  }
  return chip.energy_const *
         std::pow(static_cast<double>(c_prec) / chip.c_max, chip.alpha);
}

double e_compute_device(int c_prec, const ChipModel& chip) {
  const double mac = e_mac(c_prec, chip);
  const double main_buffer = 2.0 * mac;
  const double local_buffer = mac;
  const double reuse =
      std::sqrt(static_cast<double>(c_prec) / (chip.parallelism * chip.c_max));

  const double compute =
      mac * chip.n_mac + 3.0 * chip.n_outputs * e_mac(chip.c_max, chip);
  const double weights =
      main_buffer * chip.n_weights + local_buffer * chip.n_mac * reuse;
  const double activations =
      2.0 * main_buffer * chip.n_outputs + local_buffer * chip.n_mac * reuse;
  return compute + weights + activations;
}

double e_compute_round(int c_prec, const ChipModel& chip, int n_selected) {
  if (n_selected < 0) throw DomainError("e_compute_round: n_selected must be >= 0");
  if (n_selected == 0) return 0.0;
  return chip.local_steps * n_selected * e_compute_device(c_prec, chip);
}

double payload_bits(const ChipModel& chip, int c_prec) {
  if (c_prec < 1) throw DomainError("payload_bits: c_prec must be >= 1");
  return chip.n_weights * c_prec;
}

}  // namespace cranfl
