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

#include "cranfl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cranfl/error.hpp"
#include "json.hpp"

namespace cranfl {

namespace {

using nlohmann::json;

struct Outcome {
  bool ok = false;
  std::string error;
  double total = 0.0;
  double rounds = 0.0;
  double compute = 0.0;
  double device_tx = 0.0;
  double fronthaul = 0.0;
  int c_prec = 0;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, static_cast<int>(std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, jobs) on a pool; rethrows the first exception.
template <typename Job>
void parallel_for(std::size_t jobs, int threads, Job job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs && !failed; i = next++) {
      try {
        job(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = worker_count(threads, jobs);
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

void apply_sweep(const ExperimentSpec& spec, std::size_t index, Scenario& scn,
                 OptimizerConfig& opt) {
  switch (spec.axis) {
    case SweepAxis::kGBar:
      std::fill(scn.g_bar.begin(), scn.g_bar.end(), spec.sweep_values[index]);
      break;
    case SweepAxis::kPBar:
      std::fill(scn.p_bar.begin(), scn.p_bar.end(), dbm_to_watt(spec.sweep_values[index]));
      break;
    case SweepAxis::kEpsTarget:
      scn.conv.eps_target = spec.sweep_values[index];
      break;
    case SweepAxis::kModelCase:
      apply_model_case(scn, find_model_case(spec.sweep_cases[index]));
      break;
    case SweepAxis::kCPrec:
      opt.fixed_precision = static_cast<int>(spec.sweep_values[index]);
      break;
  }
}

std::string sweep_label(const ExperimentSpec& spec, std::size_t index) {
  if (spec.axis == SweepAxis::kModelCase) return spec.sweep_cases[index];
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", spec.sweep_values[index]);
  return buf;
}

ChannelRealization sample_realization(const Scenario& scn, std::uint64_t seed, int r) {
  Rng rng = make_rng(seed, {static_cast<std::uint64_t>(r)});
  const Topology topo = sample_topology(scn, rng);
  return sample_channels(scn, topo, rng);
}

OptimizationTrace run_scheme(const Scenario& scn, const ChannelRealization& ch,
                             const std::string& scheme, const OptimizerConfig& opt) {
  if (scheme == "joint") return alternating_optimize(scn, ch, initial_allocation(scn), opt);
  for (int b = 1; b <= 4; ++b) {
    if (scheme == "baseline" + std::to_string(b)) return evaluate_baseline(scn, ch, b, opt);
  }
  throw InvalidInput("unknown scheme '" + scheme + "'");
}

ResultTable run_experiment(const Config& cfg) {
  const ExperimentSpec& spec = cfg.experiment;
  spec.validate();
  const std::size_t points = spec.sweep_size();
  const std::size_t reals = static_cast<std::size_t>(spec.realizations);
  const std::size_t schemes = spec.schemes.size();

  std::vector<Scenario> scenarios(points, cfg.scenario);
  std::vector<OptimizerConfig> optimizers(points, cfg.optimizer);
  for (std::size_t i = 0; i < points; ++i) {
    apply_sweep(spec, i, scenarios[i], optimizers[i]);
    scenarios[i].validate();
  }

  std::vector<Outcome> outcomes(points * reals * schemes);
  parallel_for(points * reals, spec.threads, [&](std::size_t job) {
    const std::size_t i = job / reals;
    const int r = static_cast<int>(job % reals);
    const Scenario& scn = scenarios[i];
    const ChannelRealization ch = sample_realization(scn, spec.seed, r);
    for (std::size_t s = 0; s < schemes; ++s) {
      Outcome& out = outcomes[job * schemes + s];
      try {
        const OptimizationTrace tr = run_scheme(scn, ch, spec.schemes[s], optimizers[i]);
        const EnergyReport& rep = tr.report;
        out.ok = true;
        out.total = rep.total;
        out.rounds = rep.rounds_T;
        out.compute = rep.rounds_T * rep.e_compute_per_round;
        out.device_tx = rep.rounds_T * rep.e_device_tx_per_round;
        out.fronthaul = rep.rounds_T * rep.e_fronthaul_per_round;
        out.c_prec = rep.c_prec;
      } catch (const std::runtime_error& e) {
        out.error = e.what();
      } catch (const DomainError& e) {
        out.error = e.what();
      }
    }
  });

  ResultTable table;
  table.axis = spec.axis;
  table.realizations = spec.realizations;
  table.seed = spec.seed;
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t s = 0; s < schemes; ++s) {
      SchemeSummary row;
      row.sweep_label = sweep_label(spec, i);
      row.scheme = spec.schemes[s];
      std::vector<double> totals, rounds, compute, device_tx, fronthaul;
      std::map<int, int> precision_count;
      for (std::size_t r = 0; r < reals; ++r) {
        const Outcome& o = outcomes[(i * reals + r) * schemes + s];
        if (!o.ok) {
          ++row.failed;
          if (row.first_error.empty()) row.first_error = o.error;
          continue;
        }
        ++row.succeeded;
        totals.push_back(o.total);
        rounds.push_back(o.rounds);
        compute.push_back(o.compute);
        device_tx.push_back(o.device_tx);
        fronthaul.push_back(o.fronthaul);
        ++precision_count[o.c_prec];
      }
      if (row.failed * 10 > spec.realizations) {
        throw std::runtime_error("run_experiment: " + std::to_string(row.failed) + " of " +
                                 std::to_string(spec.realizations) + " realizations failed for " +
                                 row.scheme + " at " + sweep_axis_name(spec.axis) + " = " +
                                 row.sweep_label + ": " + row.first_error);
      }
      row.mean_total_J = mean_of(totals);
      row.se_total_J = standard_error(totals);
      row.mean_T_rounds = mean_of(rounds);
      row.compute_J = mean_of(compute);
      row.device_tx_J = mean_of(device_tx);
      row.fronthaul_J = mean_of(fronthaul);
      int best = 0;
      for (const auto& [c, n] : precision_count) {
        if (n > best) {
          best = n;
          row.c_prec_mode = c;
        }
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

void write_result_csv(std::ostream& out, const ResultTable& table) {
  out << "sweep_value,scheme,mean_total_J,se_total_J,mean_T_rounds,c_prec_mode,compute_J,"
         "device_tx_J,fronthaul_J\n";
  for (const auto& r : table.rows) {
    out << r.sweep_label << ',' << r.scheme << ',' << format_double(r.mean_total_J) << ','
        << format_double(r.se_total_J) << ',' << format_double(r.mean_T_rounds) << ','
        << r.c_prec_mode << ',' << format_double(r.compute_J) << ','
        << format_double(r.device_tx_J) << ',' << format_double(r.fronthaul_J) << '\n';
  }
}

void write_result_json(std::ostream& out, const ResultTable& table) {
  json doc;
  doc["sweep_axis"] = sweep_axis_name(table.axis);
  doc["realizations"] = table.realizations;
  doc["seed"] = table.seed;
  doc["rows"] = json::array();
  for (const auto& r : table.rows) {
    json row;
    if (table.axis == SweepAxis::kModelCase) {
      row["sweep_value"] = r.sweep_label;
    } else {
      row["sweep_value"] = std::stod(r.sweep_label);
    }
    row["scheme"] = r.scheme;
    row["mean_total_J"] = r.mean_total_J;
    row["se_total_J"] = r.se_total_J;
    row["mean_T_rounds"] = r.mean_T_rounds;
    row["c_prec_mode"] = r.c_prec_mode;
    row["compute_J"] = r.compute_J;
    row["device_tx_J"] = r.device_tx_J;
    row["fronthaul_J"] = r.fronthaul_J;
    row["succeeded"] = r.succeeded;
    row["failed"] = r.failed;
    doc["rows"].push_back(row);
  }
  out << doc.dump(2) << '\n';
}

void write_trace_json(std::ostream& out, const OptimizationTrace& tr) {
  json doc;
  doc["scheme"] = tr.scheme;
  json outer = json::array();
  for (const auto& e : tr.outer) {
    outer.push_back({{"iteration", e.iteration},
                     {"stage", stage_name(e.stage)},
                     {"objective_J", e.objective}});
  }
  doc["outer"] = outer;
  doc["fp_inner"] = tr.fp_inner;
  doc["sca_inner"] = tr.sca_inner;
  doc["allocation"] = {{"c_prec", tr.allocation.c_prec},
                       {"N", tr.allocation.N},
                       {"power_W", tr.allocation.p},
                       {"fronthaul_bits", tr.allocation.c_bits}};
  const EnergyReport& r = tr.report;
  doc["report"] = {{"c_prec", r.c_prec},
                   {"rounds_T", r.rounds_T},
                   {"e_compute_per_round_J", r.e_compute_per_round},
                   {"e_device_tx_per_round_J", r.e_device_tx_per_round},
                   {"e_fronthaul_per_round_J", r.e_fronthaul_per_round},
                   {"total_J", r.total},
                   {"device_tx_per_round_J", r.device_tx_per_round},
                   {"fronthaul_per_round_J", r.fronthaul_per_round}};
  out << doc.dump(2) << '\n';
}

void write_trace_outer_csv(std::ostream& out, const OptimizationTrace& tr) {
  out << "iteration,stage,objective_J\n";
  for (const auto& e : tr.outer) {
    out << e.iteration << ',' << stage_name(e.stage) << ',' << format_double(e.objective) << '\n';
  }
}

SyntheticTask make_fl_task(const FLSpec& spec) {
  Rng rng = make_rng(spec.task_seed, {});
  return make_task(spec.task, spec.K, spec.d, spec.samples_per_device, spec.mu_reg, rng,
                   spec.feature_var);
}

FLTable run_fl_experiment(const Config& cfg) {
  const FLSpec& spec = cfg.fl;
  spec.validate();
  const SyntheticTask task = make_fl_task(spec);
  FLTable table;
  for (int c : spec.c_prec_values) {
    FLRunConfig run = spec.run;
    run.c_prec = c;
    if (run.rounds == 0) {
      const auto traces = run_fl_seeds(task, run, spec.seeds, cfg.experiment.threads);
      table.rows.push_back({c, "initial_gap", traces.front().loss_gap.front()});
      table.traces.insert(table.traces.end(), traces.begin(), traces.end());
      continue;
    }
    BoundReport rep = bound_check(task, run, spec.seeds, cfg.experiment.threads);
    std::vector<double> finals;
    for (const auto& tr : rep.traces) finals.push_back(tr.loss_gap.back());
    table.rows.push_back({c, "mean_final_gap", mean_of(finals)});
    table.rows.push_back({c, "se_final_gap", standard_error(finals)});
    table.rows.push_back({c, "initial_gap", rep.traces.front().loss_gap.front()});
    table.rows.push_back({c, "bound_exceedance", rep.exceedance});
    table.traces.insert(table.traces.end(), rep.traces.begin(), rep.traces.end());
  }
  return table;
}

void write_fl_csv(std::ostream& out, const FLTable& table) {
  out << "c_prec,metric,value\n";
  for (const auto& r : table.rows) {
    out << r.c_prec << ',' << r.metric << ',' << format_double(r.value) << '\n';
  }
}

void write_fl_json(std::ostream& out, const FLTable& table) {
  json doc;
  doc["rows"] = json::array();
  for (const auto& r : table.rows) {
    doc["rows"].push_back({{"c_prec", r.c_prec}, {"metric", r.metric}, {"value", r.value}});
  }
  out << doc.dump(2) << '\n';
}

}  // namespace cranfl
