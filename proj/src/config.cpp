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

#include "cranfl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cranfl/error.hpp"
#include "json.hpp"

namespace cranfl {

namespace {

using nlohmann::json;

// One JSON object section. Rejects keys outside `allowed` and reports type
// errors with the dotted key path.
class Section {
 public:
  Section(const json& root, const std::string& name, std::initializer_list<const char*> allowed)
      : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) throw ConfigError(name + ": expected an object");
    for (const auto& item : node_->items()) {
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
            return item.key() == a;
          }) == allowed.end()) {
        throw ConfigError("unknown key '" + name + "." + item.key() + "'");
      }
    }
  }

  bool has(const char* key) const { return node_ && node_->contains(key); }
  std::string path(const char* key) const { return name_ + "." + key; }
  const json& raw(const char* key) const { return node_->at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    return as_number(raw(key), path(key));
  }

  long long integer(const char* key, long long fallback) const {
    if (!has(key)) return fallback;
    return as_integer(raw(key), path(key));
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!raw(key).is_string()) throw ConfigError(path(key) + ": expected a string");
    return raw(key).get<std::string>();
  }

  // Scalar broadcast to `count` entries, or an array of exactly `count`.
  std::vector<double> numbers(const char* key, double fallback, int count) const {
    if (!has(key)) return std::vector<double>(count, fallback);
    const json& v = raw(key);
    if (v.is_array()) {
      if (static_cast<int>(v.size()) != count) {
        throw ConfigError(path(key) + ": expected " + std::to_string(count) + " entries");
      }
      std::vector<double> out;
      for (const auto& e : v) out.push_back(as_number(e, path(key)));
      return out;
    }
    return std::vector<double>(count, as_number(v, path(key)));
  }

  std::vector<double> list(const char* key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path(key) + ": expected an array");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, path(key)));
    return out;
  }

  std::vector<std::string> strings(const char* key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path(key) + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError(path(key) + ": expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
  }

  static long long as_integer(const json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (x == std::floor(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
    }
    throw ConfigError(where + ": expected an integer");
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
};

int to_int(long long v, const std::string& where) {
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(where + ": out of range");
  return static_cast<int>(v);
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "G_bar") return SweepAxis::kGBar;
  if (s == "P_bar") return SweepAxis::kPBar;
  if (s == "eps_target") return SweepAxis::kEpsTarget;
  if (s == "model_case") return SweepAxis::kModelCase;
  if (s == "c_prec") return SweepAxis::kCPrec;
  throw ConfigError("experiment.sweep_axis: unknown axis '" + s +
                    "' (expected G_bar, P_bar, eps_target, model_case or c_prec)");
}

void read_scenario(const json& root, Scenario& s) {
  const Section sc(root, "scenario",
                   {"K", "M", "N", "bandwidth_hz", "radius_m", "pathloss_ref_db", "pathloss_exp",
                    "noise_dbm_per_hz", "p_bar_dbm", "g_bar_bps", "p_fl_w_per_bps"});
  s.K = to_int(sc.integer("K", s.K), sc.path("K"));
  s.M = to_int(sc.integer("M", s.M), sc.path("M"));
  s.N = to_int(sc.integer("N", s.N), sc.path("N"));
  if (s.K < 1 || s.M < 1 || s.N < 1) throw ConfigError("scenario: K, M, N must be >= 1");
  s.bandwidth_hz = sc.number("bandwidth_hz", s.bandwidth_hz);
  s.radius_m = sc.number("radius_m", s.radius_m);
  s.pathloss_ref_db = sc.number("pathloss_ref_db", s.pathloss_ref_db);
  s.pathloss_exp = sc.number("pathloss_exp", s.pathloss_exp);

  const double noise_psd = sc.number("noise_dbm_per_hz", -174.0);
  s.noise_var.assign(static_cast<std::size_t>(s.M) * s.N,
                     dbm_to_watt(noise_psd) * s.bandwidth_hz / s.N);
  s.p_bar.clear();
  for (double dbm : sc.numbers("p_bar_dbm", 23.0, s.K)) s.p_bar.push_back(dbm_to_watt(dbm));
  s.g_bar = sc.numbers("g_bar_bps", 1.2e9, s.M);
  s.p_fl = sc.numbers("p_fl_w_per_bps", 1e-10, s.M);
  try {
    s.sc_map = equal_sc_map(s.K, s.N);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario.K: ") + e.what());
  }
}

void read_chip(const json& root, Scenario& s) {
  const Section c(root, "chip",
                  {"model_case", "energy_const_j", "alpha", "c_max", "parallelism", "n_mac",
                   "n_weights", "n_outputs"});
  if (c.has("model_case")) {
    const ModelCase& mc = find_model_case(c.text("model_case", ""));
    s.chip.n_weights = mc.n_weights;
    s.chip.n_mac = mc.n_mac;
    s.chip.n_outputs = mc.n_outputs;
  }
  s.chip.energy_const = c.number("energy_const_j", s.chip.energy_const);
  s.chip.alpha = c.number("alpha", s.chip.alpha);
  s.chip.c_max = to_int(c.integer("c_max", s.chip.c_max), c.path("c_max"));
  s.chip.parallelism = c.number("parallelism", s.chip.parallelism);
  s.chip.n_mac = c.number("n_mac", s.chip.n_mac);
  s.chip.n_weights = c.number("n_weights", s.chip.n_weights);
  s.chip.n_outputs = c.number("n_outputs", s.chip.n_outputs);
  if (s.chip.c_max > kMaxQuantBits) {
    throw ConfigError("chip.c_max: at most " + std::to_string(kMaxQuantBits));
  }
}

void read_convergence(const json& root, Scenario& s) {
  const Section c(root, "convergence",
                  {"L", "mu", "G", "sigma_k", "W_bound", "eps_skew", "beta", "gamma", "I",
                   "K_bar", "eps_target"});
  auto& v = s.conv;
  v.L = c.number("L", v.L);
  v.mu = c.number("mu", v.mu);
  v.G = c.number("G", v.G);
  v.sigma_k = c.numbers("sigma_k", 1.0, s.K);
  v.W_bound = c.number("W_bound", v.W_bound);
  v.eps_skew = c.number("eps_skew", v.eps_skew);
  v.beta = c.number("beta", 2.0 / v.mu);
  v.gamma = c.number("gamma", v.gamma);
  v.I = to_int(c.integer("I", v.I), c.path("I"));
  v.K = s.K;
  v.K_bar = to_int(c.integer("K_bar", std::min(v.K_bar, s.K)), c.path("K_bar"));
  v.eps_target = c.number("eps_target", v.eps_target);
  v.d = s.chip.n_weights;
  s.chip.local_steps = v.I;
}

void read_optimizer(const json& root, int M, OptimizerConfig& o) {
  const Section c(root, "optimizer",
                  {"outer_tol", "outer_max_iter", "fp_max_iter", "fp_tol", "sca_max_iter",
                   "sca_tol", "fw_max_iter", "fw_tol", "line_search_iter", "beta_round",
                   "pgd_max_iter", "pgd_tol", "pgd_shrink", "fixed_precision"});
  o.outer_tol = c.number("outer_tol", o.outer_tol);
  o.outer_max_iter = to_int(c.integer("outer_max_iter", o.outer_max_iter), c.path("outer_max_iter"));
  o.fp_max_iter = to_int(c.integer("fp_max_iter", o.fp_max_iter), c.path("fp_max_iter"));
  o.fp_tol = c.number("fp_tol", o.fp_tol);
  o.sca_max_iter = to_int(c.integer("sca_max_iter", o.sca_max_iter), c.path("sca_max_iter"));
  o.sca_tol = c.number("sca_tol", o.sca_tol);
  o.fw_max_iter = to_int(c.integer("fw_max_iter", o.fw_max_iter), c.path("fw_max_iter"));
  o.fw_tol = c.number("fw_tol", o.fw_tol);
  o.line_search_iter =
      to_int(c.integer("line_search_iter", o.line_search_iter), c.path("line_search_iter"));
  if (c.has("beta_round")) {
    if (c.raw("beta_round").is_array()) {
      o.beta_round = c.numbers("beta_round", 0.5, M);
    } else {
      o.beta_round_default = c.number("beta_round", o.beta_round_default);
    }
  }
  o.pgd_max_iter = to_int(c.integer("pgd_max_iter", o.pgd_max_iter), c.path("pgd_max_iter"));
  o.pgd_tol = c.number("pgd_tol", o.pgd_tol);
  o.pgd_shrink = c.number("pgd_shrink", o.pgd_shrink);
  o.fixed_precision =
      to_int(c.integer("fixed_precision", o.fixed_precision), c.path("fixed_precision"));
}

void read_experiment(const json& root, const Scenario& s, ExperimentSpec& e) {
  const Section c(root, "experiment",
                  {"sweep_axis", "sweep_values", "realizations", "seed", "schemes", "threads",
                   "output", "format"});
  e.axis = parse_axis(c.text("sweep_axis", sweep_axis_name(e.axis)));
  if (c.has("sweep_values")) {
    if (e.axis == SweepAxis::kModelCase) {
      e.sweep_cases = c.strings("sweep_values");
    } else {
      e.sweep_values = c.list("sweep_values");
    }
  } else {
    switch (e.axis) {
      case SweepAxis::kGBar: e.sweep_values = {s.g_bar[0]}; break;
      case SweepAxis::kPBar: e.sweep_values = {10.0 * std::log10(s.p_bar[0] * 1e3)}; break;
      case SweepAxis::kEpsTarget: e.sweep_values = {s.conv.eps_target}; break;
      case SweepAxis::kModelCase: e.sweep_cases = {"case1"}; break;
      case SweepAxis::kCPrec: e.sweep_values = {16.0}; break;
    }
  }
  e.realizations = to_int(c.integer("realizations", e.realizations), c.path("realizations"));
  const long long seed = c.integer("seed", static_cast<long long>(e.seed));
  if (seed < 0) throw ConfigError(c.path("seed") + ": must be >= 0");
  e.seed = static_cast<std::uint64_t>(seed);
  if (c.has("schemes")) e.schemes = c.strings("schemes");
  e.threads = to_int(c.integer("threads", e.threads), c.path("threads"));
  e.output = c.text("output", e.output);
  e.format = c.text("format", e.format);
  if (e.axis == SweepAxis::kCPrec) {
    for (double v : e.sweep_values) {
      if (v != std::floor(v) || v < 1 || v > s.chip.c_max) {
        throw ConfigError("experiment.sweep_values: c_prec values must be integers in [1, C_max]");
      }
    }
  }
  for (const auto& name : e.sweep_cases) find_model_case(name);
}

void read_fl(const json& root, FLSpec& f) {
  const Section c(root, "fl",
                  {"task", "K", "d", "samples_per_device", "mu_reg", "feature_var", "task_seed",
                   "rounds", "I", "K_bar", "batch", "beta", "gamma", "c_max", "c_prec_values",
                   "seeds", "seed", "trace_output"});
  if (c.has("task")) {
    try {
      f.task = parse_task_kind(c.text("task", ""));
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("fl.task: ") + e.what());
    }
  }
  f.K = to_int(c.integer("K", f.K), c.path("K"));
  f.d = to_int(c.integer("d", f.d), c.path("d"));
  f.samples_per_device =
      to_int(c.integer("samples_per_device", f.samples_per_device), c.path("samples_per_device"));
  f.mu_reg = c.number("mu_reg", f.mu_reg);
  f.feature_var = c.number("feature_var", f.feature_var);
  f.task_seed = static_cast<std::uint64_t>(c.integer("task_seed", static_cast<long long>(f.task_seed)));
  f.run.rounds = to_int(c.integer("rounds", f.run.rounds), c.path("rounds"));
  f.run.I = to_int(c.integer("I", f.run.I), c.path("I"));
  f.run.K_bar = to_int(c.integer("K_bar", std::min(f.run.K_bar, f.K)), c.path("K_bar"));
  f.run.batch = to_int(c.integer("batch", f.run.batch), c.path("batch"));
  f.run.beta = c.number("beta", f.run.beta);
  f.run.gamma = c.number("gamma", f.run.gamma);
  f.run.c_max = to_int(c.integer("c_max", f.run.c_max), c.path("c_max"));
  if (c.has("c_prec_values")) {
    f.c_prec_values.clear();
    for (double v : c.list("c_prec_values")) {
      f.c_prec_values.push_back(to_int(Section::as_integer(json(v), c.path("c_prec_values")),
                                       c.path("c_prec_values")));
    }
  }
  f.seeds = to_int(c.integer("seeds", f.seeds), c.path("seeds"));
  f.run.seed = static_cast<std::uint64_t>(c.integer("seed", static_cast<long long>(f.run.seed)));
  f.trace_output = c.text("trace_output", f.trace_output);
}

}  // namespace

const std::vector<ModelCase>& model_cases() {
  static const std::vector<ModelCase> cases{
      {"case1", 0.28e6, 0.37e6, 2266.0},
      {"case1_batch16", 0.28e6, 11.85e6, 2266.0},
      {"case2", 1.05e6, 39.70e6, 2394.0},
      {"case3", 2.08e6, 70.56e6, 3394.0},
      {"case4", 6.08e6, 198.56e6, 5368.0},
      {"case5", 7.08e6, 230.56e6, 6368.0},
  };
  return cases;
}

const ModelCase& find_model_case(const std::string& name) {
  for (const auto& mc : model_cases()) {
    if (mc.name == name) return mc;
  }
  throw ConfigError("unknown model case '" + name + "'");
}

void apply_model_case(Scenario& scn, const ModelCase& mc) {
  auto set = [&](ChipModel& chip) {
    chip.n_weights = mc.n_weights;
    chip.n_mac = mc.n_mac;
    chip.n_outputs = mc.n_outputs;
  };
  set(scn.chip);
  for (auto& chip : scn.device_chips) set(chip);
  scn.conv.d = mc.n_weights;
}

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kGBar: return "G_bar";
    case SweepAxis::kPBar: return "P_bar";
    case SweepAxis::kEpsTarget: return "eps_target";
    case SweepAxis::kModelCase: return "model_case";
    case SweepAxis::kCPrec: return "c_prec";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  if (realizations < 1) throw ConfigError("experiment.realizations: must be >= 1");
  if (sweep_size() == 0) throw ConfigError("experiment.sweep_values: must not be empty");
  for (std::size_t i = 1; i < sweep_values.size(); ++i) {
    if (!(sweep_values[i] > sweep_values[i - 1])) {
      throw ConfigError("experiment.sweep_values: must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < sweep_cases.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (sweep_cases[i] == sweep_cases[j]) {
        throw ConfigError("experiment.sweep_values: duplicate model case '" + sweep_cases[i] + "'");
      }
    }
  }
  if (schemes.empty()) throw ConfigError("experiment.schemes: must not be empty");
  for (const auto& s : schemes) {
    if (s != "joint" && s != "baseline1" && s != "baseline2" && s != "baseline3" &&
        s != "baseline4") {
      throw ConfigError("experiment.schemes: unknown scheme '" + s + "'");
    }
  }
  if (format != "csv" && format != "json") {
    throw ConfigError("experiment.format: expected csv or json");
  }
  if (threads < 0) throw ConfigError("experiment.threads: must be >= 0");
}

void FLSpec::validate() const {
  if (K < 1 || d < 1 || samples_per_device < 1) {
    throw ConfigError("fl: K, d, samples_per_device must be >= 1");
  }
  if (!(mu_reg > 0.0) || !(feature_var > 0.0)) {
    throw ConfigError("fl: mu_reg and feature_var must be positive");
  }
  if (run.rounds < 0 || run.I < 0 || run.batch < 0) {
    throw ConfigError("fl: rounds, I, batch must be >= 0");
  }
  if (run.K_bar < 1 || run.K_bar > K) throw ConfigError("fl.K_bar: must lie in [1, K]");
  if (run.c_max < 1 || run.c_max > kMaxQuantBits) {
    throw ConfigError("fl.c_max: must lie in [1, " + std::to_string(kMaxQuantBits) + "]");
  }
  if (c_prec_values.empty()) throw ConfigError("fl.c_prec_values: must not be empty");
  for (std::size_t i = 0; i < c_prec_values.size(); ++i) {
    if (c_prec_values[i] < 1 || c_prec_values[i] > run.c_max) {
      throw ConfigError("fl.c_prec_values: must lie in [1, c_max]");
    }
    if (i > 0 && c_prec_values[i] <= c_prec_values[i - 1]) {
      throw ConfigError("fl.c_prec_values: must be strictly increasing");
    }
  }
  if (seeds < 1) throw ConfigError("fl.seeds: must be >= 1");
}

Config parse_config(const std::string& text, const std::string& source) {
  json root = json::object();
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](unsigned char ch) { return std::isspace(ch); });
  if (!blank) {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(source + ": " + e.what());
    }
  }
  if (!root.is_object()) throw ConfigError(source + ": top level must be an object");
  for (const auto& item : root.items()) {
    const std::string& k = item.key();
    if (k != "scenario" && k != "chip" && k != "convergence" && k != "optimizer" &&
        k != "experiment" && k != "fl") {
      throw ConfigError("unknown key '" + k + "'");
    }
  }

  Config cfg;
  Scenario& s = cfg.scenario;
  read_scenario(root, s);
  read_chip(root, s);
  read_convergence(root, s);
  read_optimizer(root, s.M, cfg.optimizer);
  read_experiment(root, s, cfg.experiment);
  read_fl(root, cfg.fl);
  cfg.experiment.scenario_path = source;

  try {
    s.chip.validate();
    s.conv.validate();
    s.validate();
    cfg.optimizer.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(source + ": " + e.what());
  }
  cfg.experiment.validate();
  cfg.fl.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace cranfl
