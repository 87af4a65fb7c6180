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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cranfl/error.hpp"
#include "cranfl/optimizer.hpp"

namespace cranfl {

namespace {

constexpr double kMonotoneSlack = 1e-9;

struct Stages {
  bool power = true;
  bool fronthaul = true;
};

double objective(const Scenario& scn, const ChannelRealization& ch, const Allocation& alloc) {
  try {
    return expected_total_energy(scn, ch, alloc).total;
  } catch (const AccuracyUnreachable&) {
    return std::numeric_limits<double>::infinity();
  }
}

void record(OptimizationTrace& tr, int iteration, Stage stage, double value) {
  if (!tr.outer.empty()) {
    const double prev = tr.outer.back().objective;
    if (std::isfinite(prev) && value > prev + kMonotoneSlack * std::abs(prev)) {
      throw std::logic_error(std::string("alternating_optimize: objective rose in ") +
                             stage_name(stage) + " stage of iteration " +
                             std::to_string(iteration) + " (" + std::to_string(prev) +
                             " -> " + std::to_string(value) + " J)");
    }
  }
  tr.outer.push_back(TraceEntry{iteration, stage, value, true, true});
}

OptimizationTrace run_alternating(const Scenario& scn, const ChannelRealization& ch,
                                  const Allocation& alloc0, const OptimizerConfig& cfg,
                                  Stages stages) {
  cfg.validate();
  const std::string why = check_feasible(scn, alloc0);
  if (!why.empty()) throw Infeasible("alternating_optimize: infeasible start: " + why);

  OptimizationTrace tr;
  tr.allocation = alloc0;
  if (cfg.fixed_precision > 0) tr.allocation.c_prec = cfg.fixed_precision;
  double current = objective(scn, ch, tr.allocation);
  record(tr, 0, Stage::kInitial, current);

  for (int it = 1; it <= cfg.outer_max_iter; ++it) {
    const double start = current;

    tr.allocation.c_prec = cfg.fixed_precision > 0
                               ? cfg.fixed_precision
                               : optimize_precision(scn, ch, tr.allocation);
    current = objective(scn, ch, tr.allocation);
    record(tr, it, Stage::kPrecision, current);

    if (stages.power) {
      tr.fp_inner.emplace_back();
      tr.allocation.p = fp_power_allocation(scn, ch, tr.allocation, cfg, &tr.fp_inner.back());
      current = objective(scn, ch, tr.allocation);
      record(tr, it, Stage::kPower, current);
    }
    if (stages.fronthaul) {
      tr.sca_inner.emplace_back();
      tr.allocation.c_bits =
          sca_fronthaul(scn, ch, tr.allocation, cfg, &tr.sca_inner.back());
      current = objective(scn, ch, tr.allocation);
      record(tr, it, Stage::kFronthaul, current);
    }

    if (std::isfinite(start) && start - current <= cfg.outer_tol * std::abs(current)) break;
  }

  tr.report = expected_total_energy(scn, ch, tr.allocation);
  return tr;
}

}  // namespace

void OptimizerConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw InvalidInput(std::string("OptimizerConfig: ") + name + " must be > 0");
  };
  positive(outer_tol, "outer_tol");
  positive(fp_tol, "fp_tol");
  positive(sca_tol, "sca_tol");
  positive(fw_tol, "fw_tol");
  positive(pgd_tol, "pgd_tol");
  if (outer_max_iter < 0 || fp_max_iter < 0 || sca_max_iter < 0 || fw_max_iter < 0 ||
      pgd_max_iter < 0 || line_search_iter < 0) {
    throw InvalidInput("OptimizerConfig: iteration caps must be >= 0");
  }
  if (!(pgd_shrink > 0.0 && pgd_shrink < 1.0)) {
    throw InvalidInput("OptimizerConfig: pgd_shrink must lie in (0, 1)");
  }
  if (!(beta_round_default >= 0.0 && beta_round_default <= 1.0)) {
    throw InvalidInput("OptimizerConfig: beta_round must lie in [0, 1]");
  }
  for (double b : beta_round) {
    if (!(b >= 0.0 && b <= 1.0)) throw InvalidInput("OptimizerConfig: beta_round must lie in [0, 1]");
  }
  if (fixed_precision < 0) throw InvalidInput("OptimizerConfig: fixed_precision must be >= 0");
}

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kInitial: return "initial";
    case Stage::kPrecision: return "precision";
    case Stage::kPower: return "power";
    case Stage::kFronthaul: return "fronthaul";
  }
  return "unknown";
}

Allocation initial_allocation(const Scenario& scn) {
  return equal_allocation(scn, scn.chip.c_max / 2);
}

OptimizationTrace alternating_optimize(const Scenario& scn, const ChannelRealization& ch,
                                       const Allocation& alloc0, const OptimizerConfig& cfg) {
  OptimizationTrace tr = run_alternating(scn, ch, alloc0, cfg, Stages{true, true});
  tr.scheme = "joint";
  return tr;
}

OptimizationTrace evaluate_baseline(const Scenario& scn, const ChannelRealization& ch,
                                    int which, const OptimizerConfig& cfg) {
  if (which < 1 || which > 4) throw InvalidInput("evaluate_baseline: which must be 1..4");
  if (which == 4 && scn.chip.c_max < 31) {
    throw InvalidInput("evaluate_baseline: baseline 4 needs C_max >= 31");
  }
  OptimizationTrace tr;
  if (which == 4) {
    cfg.validate();
    tr.allocation = equal_allocation(scn, 31);
    tr.report = expected_total_energy(scn, ch, tr.allocation);
    tr.outer.push_back(TraceEntry{0, Stage::kInitial, tr.report.total, true, true});
  } else {
    const Stages stages{which == 2, which == 1};
    tr = run_alternating(scn, ch, initial_allocation(scn), cfg, stages);
  }
  tr.scheme = "baseline" + std::to_string(which);
  return tr;
}

}  // namespace cranfl
