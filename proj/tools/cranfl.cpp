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

// cranfl: batch driver for the Cloud-RAN federated-learning energy model.
//
//   cranfl optimize  --config C [--seed S] [--out F] [--format csv|json]
//   cranfl sweep     --config C [--seed S] [--realizations N] [--out F] [--format csv|json]
//   cranfl baselines --config C [--seed S] [--realizations N] [--out F] [--format csv|json]
//   cranfl flsim     --config C [--seed S] [--realizations N] [--out F] [--format csv|json]
//
// For flsim, --realizations sets the number of FL seeds.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cranfl/config.hpp"
#include "cranfl/error.hpp"
#include "cranfl/experiment.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::string out;
  std::string format;
};

void add_common(CLI::App* cmd, Options& opt, bool with_realizations) {
  cmd->add_option("--config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "base random seed");
  if (with_realizations) {
    cmd->add_option("--realizations", opt.realizations, "channel realizations (FL seeds for flsim)")
        ->check(CLI::PositiveNumber);
  }
  cmd->add_option("--out", opt.out, "output file (default: standard output)");
  cmd->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

cranfl::Config load(const Options& opt) {
  cranfl::Config cfg = opt.config.empty() ? cranfl::parse_config("") : cranfl::load_config(opt.config);
  if (opt.seed) {
    cfg.experiment.seed = *opt.seed;
    cfg.fl.run.seed = *opt.seed;
  }
  if (opt.realizations) {
    cfg.experiment.realizations = *opt.realizations;
    cfg.fl.seeds = *opt.realizations;
  }
  if (!opt.out.empty()) cfg.experiment.output = opt.out;
  if (!opt.format.empty()) cfg.experiment.format = opt.format;
  return cfg;
}

template <typename Write>
void emit(const cranfl::Config& cfg, Write write) {
  if (cfg.experiment.output.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(cfg.experiment.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + cfg.experiment.output + "'");
  write(file);
}

void run_optimize(const cranfl::Config& cfg) {
  const auto ch = cranfl::sample_realization(cfg.scenario, cfg.experiment.seed, 0);
  const auto trace = cranfl::alternating_optimize(
      cfg.scenario, ch, cranfl::initial_allocation(cfg.scenario), cfg.optimizer);
  emit(cfg, [&](std::ostream& os) {
    if (cfg.experiment.format == "json") {
      cranfl::write_trace_json(os, trace);
    } else {
      cranfl::write_trace_outer_csv(os, trace);
    }
  });
}

void run_sweep(const cranfl::Config& cfg) {
  const auto table = cranfl::run_experiment(cfg);
  emit(cfg, [&](std::ostream& os) {
    if (cfg.experiment.format == "json") {
      cranfl::write_result_json(os, table);
    } else {
      cranfl::write_result_csv(os, table);
    }
  });
}

void run_flsim(const cranfl::Config& cfg) {
  const auto table = cranfl::run_fl_experiment(cfg);
  emit(cfg, [&](std::ostream& os) {
    if (cfg.experiment.format == "json") {
      cranfl::write_fl_json(os, table);
    } else {
      cranfl::write_fl_csv(os, table);
    }
  });
  if (!cfg.fl.trace_output.empty()) {
    std::ofstream file(cfg.fl.trace_output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + cfg.fl.trace_output + "'");
    cranfl::write_trace_csv(file, table.traces);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy model and optimizer for quantized federated learning over Cloud-RAN"};
  app.require_subcommand(1);
  Options opt;
  auto* optimize = app.add_subcommand("optimize", "one scenario, one realization, full trace");
  auto* sweep = app.add_subcommand("sweep", "sweep the configured axis over realizations");
  auto* baselines = app.add_subcommand("baselines", "sweep with baselines 1-4 only");
  auto* flsim = app.add_subcommand("flsim", "FL simulator over the configured precisions");
  add_common(optimize, opt, false);
  add_common(sweep, opt, true);
  add_common(baselines, opt, true);
  add_common(flsim, opt, true);
  CLI11_PARSE(app, argc, argv);

  try {
    cranfl::Config cfg = load(opt);
    if (optimize->parsed()) {
      run_optimize(cfg);
    } else if (sweep->parsed()) {
      run_sweep(cfg);
    } else if (baselines->parsed()) {
      cfg.experiment.schemes = {"baseline1", "baseline2", "baseline3", "baseline4"};
      run_sweep(cfg);
    } else {
      run_flsim(cfg);
    }
  } catch (const cranfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
