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

// Batch experiments: seeded sweeps of the energy optimizer over channel
// realizations, FL simulator sweeps over precision, and their CSV/JSON output.
//
// Energy CSV columns:
//   sweep_value    swept quantity (G_bar in bit/s, P_bar in dBm, eps_target,
//                  model case name, or c_prec in bits)
//   scheme         joint, baseline1 .. baseline4
//   mean_total_J   mean over successful realizations of the training energy
//   se_total_J     standard error of that mean
//   mean_T_rounds  mean required rounds
//   c_prec_mode    most frequent chosen precision (smallest on ties)
//   compute_J, device_tx_J, fronthaul_J
//                  whole-training means of the three components; they add
//                  up to mean_total_J
// FL CSV columns: c_prec, metric, value with metrics mean_final_gap,
// se_final_gap, initial_gap, bound_exceedance (initial_gap only when the run
// has zero rounds).

#ifndef CRANFL_EXPERIMENT_HPP
#define CRANFL_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cranfl/config.hpp"
#include "cranfl/flsim.hpp"
#include "cranfl/optimizer.hpp"

namespace cranfl {

struct SchemeSummary {
  std::string sweep_label;
  std::string scheme;
  int succeeded = 0;
  int failed = 0;
  double mean_total_J = 0.0;
  double se_total_J = 0.0;
  double mean_T_rounds = 0.0;
  int c_prec_mode = 0;
  double compute_J = 0.0;
  double device_tx_J = 0.0;
  double fronthaul_J = 0.0;
  std::string first_error;
};

struct ResultTable {
  SweepAxis axis = SweepAxis::kGBar;
  int realizations = 0;
  std::uint64_t seed = 0;
  std::vector<SchemeSummary> rows;  // sweep order, then scheme order
};

/// The scenario and optimizer settings at sweep point `index`.
void apply_sweep(const ExperimentSpec& spec, std::size_t index, Scenario& scn,
                 OptimizerConfig& opt);

std::string sweep_label(const ExperimentSpec& spec, std::size_t index);

/// Channels of realization r. The same r gives the same draw at every sweep
/// point.
ChannelRealization sample_realization(const Scenario& scn, std::uint64_t seed, int r);

/// "joint" or "baseline1" .. "baseline4".
OptimizationTrace run_scheme(const Scenario& scn, const ChannelRealization& ch,
                             const std::string& scheme, const OptimizerConfig& opt);

/// Failed realizations are counted per (sweep point, scheme); more than 10%
/// failures for any pair aborts with std::runtime_error.
ResultTable run_experiment(const Config& cfg);

void write_result_csv(std::ostream& out, const ResultTable& table);
void write_result_json(std::ostream& out, const ResultTable& table);

void write_trace_json(std::ostream& out, const OptimizationTrace& trace);
/// Columns iteration, stage, objective_J.
void write_trace_outer_csv(std::ostream& out, const OptimizationTrace& trace);

struct FLRow {
  int c_prec = 0;
  std::string metric;
  double value = 0.0;
};

struct FLTable {
  std::vector<FLRow> rows;
  std::vector<FLTrace> traces;  // every run, c_prec order then seed order
};

SyntheticTask make_fl_task(const FLSpec& spec);

FLTable run_fl_experiment(const Config& cfg);

void write_fl_csv(std::ostream& out, const FLTable& table);
void write_fl_json(std::ostream& out, const FLTable& table);

}  // namespace cranfl

#endif  // CRANFL_EXPERIMENT_HPP
