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

// Stochastic uniform quantizer over a vector's magnitude range.
//
// A value w is mapped onto the bracketing knobs s_i <= |w| <= s_{i+1} of the
// grid s_i = w_min + i * (w_max - w_min) / b, b = 2^bits - 1, choosing the
// lower knob with probability (s_{i+1} - |w|) / (s_{i+1} - s_i). The sign is
// reattached afterwards, so E[Q(w)] = w.

#ifndef CRANFL_QUANTIZATION_HPP
#define CRANFL_QUANTIZATION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "cranfl/random.hpp"

namespace cranfl {

/// Largest precision the quantizer accepts. Knob counts are held in 64 bits.
inline constexpr int kMaxQuantBits = 62;

struct QuantGrid {
  double w_min = 0.0;
  double w_max = 0.0;
  int precision_bits = 1;
  std::uint64_t knob_count = 1;  // b = 2^bits - 1
  double step = 0.0;

  double knob(std::uint64_t i) const {
    return i == knob_count ? w_max : w_min + static_cast<double>(i) * step;
  }
};

struct QuantizedVector {
  std::vector<double> values;
  QuantGrid source_grid;
};

/// Grid spanning [min|w_i|, max|w_i|]. Throws InvalidInput on an empty vector
/// and DomainError when bits is outside [1, c_max].
QuantGrid build_quant_grid(std::span<const double> w, int precision_bits,
                           int c_max = 32);

/// Throws DomainError when |w| lies outside [grid.w_min, grid.w_max].
double quantize_scalar(double w, const QuantGrid& grid, Rng& rng);

QuantizedVector quantize_vector(std::span<const double> w, int precision_bits,
                                Rng& rng, int c_max = 32);

std::vector<double> clip_weights(std::span<const double> w);

/// |w_max - w_min|^2 / ||w||^2 over magnitudes.
double skewness(std::span<const double> w);

/// d * eps_skew * ||w||^2 / (4 (2^bits - 1)^2). Throws DomainError for a zero
/// vector.
double lemma1_error_bound(std::span<const double> w, int precision_bits);

}  // namespace cranfl

#endif  // CRANFL_QUANTIZATION_HPP
