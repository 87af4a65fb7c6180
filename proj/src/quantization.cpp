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

#include "cranfl/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cranfl/error.hpp"

namespace cranfl {

QuantGrid build_quant_grid(std::span<const double> w, int precision_bits,
                           int c_max) {
  if (w.empty()) throw InvalidInput("build_quant_grid: empty vector");
  const int limit = std::min(c_max, kMaxQuantBits);
  if (precision_bits < 1 || precision_bits > limit) {
    throw DomainError("build_quant_grid: precision_bits " +
                      std::to_string(precision_bits) + " outside [1, " +
                      std::to_string(limit) + "]");
  }
  QuantGrid g;
  g.w_min = std::abs(w[0]);
  g.w_max = g.w_min;
  for (double x : w) {
    const double a = std::abs(x);
    g.w_min = std::min(g.w_min, a);
    g.w_max = std::max(g.w_max, a);
  }
  g.precision_bits = precision_bits;
  g.knob_count = (std::uint64_t{1} << precision_bits) - 1;
  g.step = (g.w_max - g.w_min) / static_cast<double>(g.knob_count);
  return g;
}

double quantize_scalar(double w, const QuantGrid& grid, Rng& rng) {
  const double a = std::abs(w);
  if (!(a >= grid.w_min && a <= grid.w_max)) {
    throw DomainError("quantize_scalar: |w| outside grid range");
  }
  const double sign = std::signbit(w) ? -1.0 : 1.0;
  if (grid.step == 0.0) return sign * a;

  // Bracket [s_i, s_{i+1}) with the last interval closed.
  const double pos = (a - grid.w_min) / grid.step;
  auto i = static_cast<std::uint64_t>(std::floor(pos));
  if (i >= grid.knob_count) i = grid.knob_count - 1;
  const double lo = grid.knob(i);
  const double hi = grid.knob(i + 1);
  if (a <= lo) return sign * lo;
  if (a >= hi) return sign * hi;

  const double p_hi = (a - lo) / (hi - lo);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return sign * (u(rng) < p_hi ? hi : lo);
}

QuantizedVector quantize_vector(std::span<const double> w, int precision_bits,
                                Rng& rng, int c_max) {
  QuantizedVector out;
  out.source_grid = build_quant_grid(w, precision_bits, c_max);
  out.values.reserve(w.size());
  for (double x : w) out.values.push_back(quantize_scalar(x, out.source_grid, rng));
  return out;
}

std::vector<double> clip_weights(std::span<const double> w) {
  std::vector<double> out(w.begin(), w.end());
  for (double& x : out) x = std::clamp(x, -1.0, 1.0);
  return out;
}

double skewness(std::span<const double> w) {
  if (w.empty()) throw InvalidInput("skewness: empty vector");
  double lo = std::abs(w[0]), hi = lo, norm2 = 0.0;
  for (double x : w) {
    lo = std::min(lo, std::abs(x));
    hi = std::max(hi, std::abs(x));
    norm2 += x * x;
  }
  if (norm2 == 0.0) throw DomainError("skewness: zero vector");
  return (hi - lo) * (hi - lo) / norm2;
}

double lemma1_error_bound(std::span<const double> w, int precision_bits) {
  if (precision_bits < 1 || precision_bits > kMaxQuantBits) {
    throw DomainError("lemma1_error_bound: precision_bits out of range");
  }
  double norm2 = 0.0;
  for (double x : w) norm2 += x * x;
  const double eps = skewness(w);
  const double b = std::ldexp(1.0, precision_bits) - 1.0;
  return static_cast<double>(w.size()) * eps * norm2 / (4.0 * b * b);
}

}  // namespace cranfl
