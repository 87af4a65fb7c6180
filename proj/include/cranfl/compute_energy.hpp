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

// Computing energy of quantized-network training on a two-dimensional
// processing chip with a MAC array, main buffer and local buffer.

#ifndef CRANFL_COMPUTE_ENERGY_HPP
#define CRANFL_COMPUTE_ENERGY_HPP

namespace cranfl {

struct ChipModel {
  double energy_const = 3.7e-12;  // A, joules per full-precision MAC
  double alpha = 1.25;            // in (1, 2)
  int c_max = 32;
  double parallelism = 64.0;      // u, MAC units in the array
  double n_mac = 0.37e6;          // MAC operations per local iteration
  double n_weights = 0.28e6;      // weight count, equals the model dimension
  double n_outputs = 2266.0;      // intermediate outputs
  int local_steps = 5;            // I

  void validate() const;
};

/// A * (c_prec / C_max)^alpha. Throws DomainError outside [1, C_max].
double e_mac(int c_prec, const ChipModel& chip);

/// E_C + E_W + E_A for one local iteration on one device.
double e_compute_device(int c_prec, const ChipModel& chip);

/// I * n_selected * e_compute_device.
double e_compute_round(int c_prec, const ChipModel& chip, int n_selected);

/// Bits in one quantized model update: one c_prec-bit word per weight.
double payload_bits(const ChipModel& chip, int c_prec);

}  // namespace cranfl

#endif  // CRANFL_COMPUTE_ENERGY_HPP
