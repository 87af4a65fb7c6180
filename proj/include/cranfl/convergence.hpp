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

// Convergence bound of quantized FedAvg with decaying learning rate
// lambda_t = beta / (t + gamma), and the rounds-for-accuracy mapping derived
// from it.

#ifndef CRANFL_CONVERGENCE_HPP
#define CRANFL_CONVERGENCE_HPP

#include <vector>

namespace cranfl {

struct ConvergenceConstants {
  double L = 1.0;                // smoothness
  double mu = 0.89;              // strong convexity
  std::vector<double> sigma_k;   // per-device gradient-variance bounds
  double G = 0.02;               // gradient-norm bound
  double W_bound = 1.0;          // sup-norm bound on the weights
  double eps_skew = 0.01;        // quantization skewness, in [0, 1]
  double d = 0.28e6;             // model dimension
  double beta = 2.0 / 0.89;
  double gamma = 1.0;
  int I = 5;                     // local SGD steps per round
  int K = 16;
  int K_bar = 10;
  double eps_target = 0.01;

  /// Throws InvalidInput when an invariant (beta*mu > 1, 1 <= K_bar <= K,
  /// mu <= L, 0 <= eps_skew <= 1, sigma_k sized K) does not hold.
  void validate() const;
};

double d_constant(const ConvergenceConstants& c, int c_prec);

/// Real-valued T; negative when the target is already met by the bound at
/// t = 0. Throws DomainError when beta * mu <= 1 or eps_target <= 0.
double rounds_for_accuracy(const ConvergenceConstants& c, int c_prec);

double theorem1_bound(const ConvergenceConstants& c, int c_prec, double t);

double learning_rate(const ConvergenceConstants& c, double t);

}  // namespace cranfl

#endif  // CRANFL_CONVERGENCE_HPP
