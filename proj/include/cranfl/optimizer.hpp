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

// Alternating minimization of the expected training energy over quantizer
// precision, per-subcarrier transmit power, and per-subcarrier fronthaul bits.
//
//  * precision: exhaustive search over {1, ..., C_max};
//  * power: quadratic-transform fractional programming, each inner concave
//    problem solved by projected gradient ascent on the capped simplex;
//  * fronthaul: successive convex approximation in psi = 2^(2C), each convex
//    surrogate solved by Frank-Wolfe with a fractional-knapsack oracle, then
//    threshold rounding back to integer bits.

#ifndef CRANFL_OPTIMIZER_HPP
#define CRANFL_OPTIMIZER_HPP

#include <span>
#include <string>
#include <vector>

#include "cranfl/channel.hpp"
#include "cranfl/energy.hpp"

namespace cranfl {

struct OptimizerConfig {
  double outer_tol = 1e-4;
  int outer_max_iter = 30;
  int fp_max_iter = 50;
  double fp_tol = 1e-6;
  int sca_max_iter = 30;
  double sca_tol = 1e-5;
  int fw_max_iter = 200;
  double fw_tol = 1e-7;        // relative Frank-Wolfe duality gap
  int line_search_iter = 40;   // golden-section steps per Frank-Wolfe move
  std::vector<double> beta_round;  // per RRH; empty means beta_round_default
  double beta_round_default = 0.5;
  int pgd_max_iter = 500;
  double pgd_tol = 1e-10;      // relative projected-gradient norm
  double pgd_shrink = 0.5;     // backtracking factor
  int fixed_precision = 0;     // > 0 pins C_prec instead of searching

  double beta_for(int m) const {
    return beta_round.empty() ? beta_round_default : beta_round[m];
  }
  void validate() const;
};

enum class Stage { kInitial, kPrecision, kPower, kFronthaul };

const char* stage_name(Stage s);

struct TraceEntry {
  int iteration = 0;
  Stage stage = Stage::kInitial;
  double objective = 0.0;
  bool power_feasible = true;
  bool fronthaul_feasible = true;
};

struct OptimizationTrace {
  std::string scheme;
  std::vector<TraceEntry> outer;
  std::vector<std::vector<double>> fp_inner;   // surrogate sum_k A_k / B_k
  std::vector<std::vector<double>> sca_inner;  // continuous E_trans before rounding
  Allocation allocation;
  EnergyReport report;
};

// Precision ----------------------------------------------------------------

/// f^E(c) for c = 1..C_max; +infinity where the accuracy target is
/// unreachable. Entry i holds c = i + 1.
std::vector<double> precision_profile(const Scenario& scn, const ChannelRealization& ch,
                                      const Allocation& alloc);

/// argmin of precision_profile (smallest c on ties). Throws AccuracyUnreachable
/// when every precision is unreachable.
int optimize_precision(const Scenario& scn, const ChannelRealization& ch,
                       const Allocation& alloc);

// Power ----------------------------------------------------------------------

/// A_k: device rate with psi = 2^(2 C) taken from the allocation.
double fp_numerator(const Scenario& scn, const ChannelRealization& ch,
                    const Allocation& alloc, int k);

/// B_k: payload bits times the device's total power.
double fp_denominator(const Scenario& scn, const Allocation& alloc, int k);

/// sum_k A_k / B_k.
double fp_surrogate(const Scenario& scn, const ChannelRealization& ch,
                    const Allocation& alloc);

/// sqrt(A_k) / B_k. Throws DomainError when B_k = 0.
double fp_y_update(const Scenario& scn, const ChannelRealization& ch,
                   const Allocation& alloc, int k);

/// Maximizes sum_k 2 y_k sqrt(A_k(p)) - y_k^2 B_k(p) over the power budgets,
/// starting from alloc.p. Returns the new (k, n) power matrix.
std::vector<double> fp_power_step(const Scenario& scn, const ChannelRealization& ch,
                                  const Allocation& alloc, std::span<const double> y,
                                  const OptimizerConfig& cfg);

/// Alternates y updates and power steps. Keeps alloc.p when the result would
/// raise the per-round device energy. `surrogate_trace`, when given, receives
/// sum_k A_k / B_k at the start and after every iteration.
std::vector<double> fp_power_allocation(const Scenario& scn, const ChannelRealization& ch,
                                        const Allocation& alloc, const OptimizerConfig& cfg,
                                        std::vector<double>* surrogate_trace = nullptr);

/// Euclidean projection onto {x >= 0, sum x <= cap}.
std::vector<double> project_capped_simplex(std::span<const double> v, double cap);

// Fronthaul ------------------------------------------------------------------

/// Per-round transmission energy with continuous psi (M x N, row-major).
double trans_energy_psi(const Scenario& scn, const ChannelRealization& ch,
                        const Allocation& alloc, std::span<const double> psi);

/// Left-hand side of RRH m's fronthaul constraint linearized at psi_tilde,
/// evaluated at psi: sum_n (log2 psi~ + (psi - psi~) / (psi~ ln 2)) / 2.
double linearized_bits(int m, int N, std::span<const double> psi,
                       std::span<const double> psi_tilde);

/// Threshold rounding of C = log2(psi~) / 2 per RRH: floor when the
/// fractional part is <= beta_m, ceil otherwise. beta holds one value per RRH.
std::vector<int> round_bits(std::span<const double> psi_tilde, int M, int N,
                            std::span<const double> beta);

/// SCA over psi, rounding, and greedy budget repair. Keeps alloc.c_bits when
/// the integer result would raise the transmission energy. Throws Infeasible
/// when some C_bar_m < N.
std::vector<int> sca_fronthaul(const Scenario& scn, const ChannelRealization& ch,
                               const Allocation& alloc, const OptimizerConfig& cfg,
                               std::vector<double>* energy_trace = nullptr);

// Outer loop -----------------------------------------------------------------

/// Alternates precision, power and fronthaul updates from alloc0. Throws
/// Infeasible for an infeasible start and std::logic_error if the true
/// objective ever rises by more than 1e-9 relative.
OptimizationTrace alternating_optimize(const Scenario& scn, const ChannelRealization& ch,
                                       const Allocation& alloc0, const OptimizerConfig& cfg);

/// Starting point of the joint scheme: equal power, equal bits, C_max / 2.
Allocation initial_allocation(const Scenario& scn);

/// Baselines 1-4: 1 equal power; 2 equal fronthaul bits; 3 both equal;
/// 4 both equal with C_prec = 31. Baselines 1-3 still optimize precision.
OptimizationTrace evaluate_baseline(const Scenario& scn, const ChannelRealization& ch,
                                    int which, const OptimizerConfig& cfg);

}  // namespace cranfl

#endif  // CRANFL_OPTIMIZER_HPP
