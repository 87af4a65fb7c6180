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

// Experiment configuration loaded from a JSON file.
//
// Top-level sections (all optional, unknown keys are rejected):
//   scenario     K, M, N, bandwidth_hz, radius_m, pathloss_ref_db, pathloss_exp,
//                noise_dbm_per_hz, p_bar_dbm, g_bar_bps, p_fl_w_per_bps
//                (the last three take a scalar or one value per device/RRH)
//   chip         model_case, energy_const_j, alpha, c_max, parallelism,
//                n_mac, n_weights, n_outputs
//   convergence  L, mu, G, sigma_k, W_bound, eps_skew, beta, gamma, I, K_bar,
//                eps_target
//   optimizer    OptimizerConfig fields by name; beta_round scalar or per RRH
//   experiment   sweep_axis, sweep_values, realizations, seed, schemes,
//                threads, output, format
//   fl           task, K, d, samples_per_device, mu_reg, feature_var,
//                task_seed, rounds, I, K_bar, batch, beta, gamma, c_max,
//                c_prec_values, seeds, seed, trace_output
// Power is given in dBm and converted to watts on load.

#ifndef CRANFL_CONFIG_HPP
#define CRANFL_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cranfl/channel.hpp"
#include "cranfl/flsim.hpp"
#include "cranfl/optimizer.hpp"

namespace cranfl {

struct ModelCase {
  std::string name;
  double n_weights = 0.0;
  double n_mac = 0.0;
  double n_outputs = 0.0;
};

/// case1 .. case5 plus case1_batch16 (case 1 trained with batch size 16).
const std::vector<ModelCase>& model_cases();

/// Throws ConfigError for an unknown name.
const ModelCase& find_model_case(const std::string& name);

/// Sets the chip counts of every device and the model dimension d.
void apply_model_case(Scenario& scn, const ModelCase& mc);

enum class SweepAxis { kGBar, kPBar, kEpsTarget, kModelCase, kCPrec };

const char* sweep_axis_name(SweepAxis axis);

struct ExperimentSpec {
  std::string scenario_path;
  SweepAxis axis = SweepAxis::kGBar;
  std::vector<double> sweep_values;      // numeric axes; P_bar in dBm
  std::vector<std::string> sweep_cases;  // model_case axis
  int realizations = 20;
  std::uint64_t seed = 1;
  std::vector<std::string> schemes{"joint", "baseline1", "baseline2", "baseline3",
                                   "baseline4"};
  int threads = 0;                       // 0: hardware concurrency
  std::string output;                    // empty: standard output
  std::string format = "csv";

  std::size_t sweep_size() const {
    return axis == SweepAxis::kModelCase ? sweep_cases.size() : sweep_values.size();
  }
  void validate() const;
};

struct FLSpec {
  TaskKind task = TaskKind::kQuadratic;
  int K = 16;
  int d = 10;
  int samples_per_device = 50;
  double mu_reg = 0.5;
  double feature_var = 0.2;
  std::uint64_t task_seed = 7;
  FLRunConfig run;                       // c_prec is taken from c_prec_values
  std::vector<int> c_prec_values{2, 4, 8, 16};
  int seeds = 50;
  std::string trace_output;              // per-round CSV, empty: not written

  void validate() const;
};

struct Config {
  Scenario scenario = Scenario::defaults();
  OptimizerConfig optimizer;
  ExperimentSpec experiment;
  FLSpec fl;
};

/// Throws ConfigError naming the offending key on schema violations.
Config parse_config(const std::string& text, const std::string& source = "<string>");

/// An empty file yields the defaults.
Config load_config(const std::string& path);

}  // namespace cranfl

#endif  // CRANFL_CONFIG_HPP
