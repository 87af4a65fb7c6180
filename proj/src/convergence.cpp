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

#include "cranfl/convergence.hpp"

#include <cmath>
#include <string>

#include "cranfl/error.hpp"

namespace cranfl {

namespace {

void require_contraction(const ConvergenceConstants& c) {
  if (!(c.beta * c.mu > 1.0)) {
    throw DomainError("convergence: beta * mu must exceed 1 (got " +
                      std::to_string(c.beta * c.mu) + ")");
  }
}

}  // namespace

void ConvergenceConstants::validate() const {
  if (!(L > 0.0) || !(mu > 0.0) || mu > L) {
    throw InvalidInput("convergence: require 0 < mu <= L");
  }
  if (!(beta * mu > 1.0)) throw InvalidInput("convergence: require beta * mu > 1");
  if (!(gamma > 0.0)) throw InvalidInput("convergence: gamma must be positive");
  if (eps_skew < 0.0 || eps_skew > 1.0) {
    throw InvalidInput("convergence: eps_skew must lie in [0, 1]");
  }
  if (K < 1 || K_bar < 1 || K_bar > K) {
    throw InvalidInput("convergence: require 1 <= K_bar <= K");
  }
  if (static_cast<int>(sigma_k.size()) != K) {
    throw InvalidInput("convergence: sigma_k must have K entries");
  }
  if (I < 1) throw InvalidInput("convergence: I must be >= 1");
  if (!(G >= 0.0) || !(W_bound >= 0.0) || !(d > 0.0)) {
    throw InvalidInput("convergence: G, W_bound must be >= 0 and d > 0");
  }
}

double d_constant(const ConvergenceConstants& c, int c_prec) {
  if (c_prec < 1) throw DomainError("d_constant: c_prec must be >= 1");
  const double K = c.K;
  const double Kb = c.K_bar;
  const double I = c.I;
  const double G2 = c.G * c.G;

  double variance = 0.0;
  for (double s : c.sigma_k) variance += s * s;
  variance /= K * K;

  // (2^c - 1)^2 overflows past c ~ 512; the terms it divides are zero there.
  const double levels = std::ldexp(1.0, c_prec) - 1.0;
  const double q = levels * levels;
  const double weight_quant =
      c.d * c.eps_skew * c.W_bound * c.W_bound * (1.0 - c.mu) / (4.0 * q);
  const double drift = 4.0 * (I - 1.0) * (I - 1.0) * G2;
  const double update_quant = 4.0 * c.d * c.eps_skew * I * I * G2 / (Kb * 4.0 * q);
  // K == 1 forces K_bar == K, where the sampling term is zero.
  const double sampling =
      c.K > 1 ? 4.0 * (K - Kb) * I * I * G2 / (Kb * (K - 1.0)) : 0.0;

  return variance + weight_quant + drift + update_quant + sampling;
}

double rounds_for_accuracy(const ConvergenceConstants& c, int c_prec) {
  require_contraction(c);
  if (!(c.eps_target > 0.0)) {
    throw DomainError("rounds_for_accuracy: eps_target must be positive");
  }
  const double D = d_constant(c, c_prec);
  return c.L * c.beta * c.beta * D /
             (2.0 * c.I * c.eps_target * (c.beta * c.mu - 1.0)) -
         c.gamma / c.I;
}

double theorem1_bound(const ConvergenceConstants& c, int c_prec, double t) {
  require_contraction(c);
  if (t < 0.0) throw DomainError("theorem1_bound: t must be >= 0");
  const double D = d_constant(c, c_prec);
  return c.L * c.beta * c.beta * D /
         (2.0 * (c.gamma + t * c.I) * (c.beta * c.mu - 1.0));
}

double learning_rate(const ConvergenceConstants& c, double t) {
  if (t < 0.0) throw DomainError("learning_rate: t must be >= 0");
  return c.beta / (t + c.gamma);
}

}  // namespace cranfl
