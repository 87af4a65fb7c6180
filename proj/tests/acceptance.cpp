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

// Acceptance suite. Prints one PASS/FAIL line per criterion with the measured
// quantities and runtime, and exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cranfl/config.hpp"
#include "cranfl/convergence.hpp"
#include "cranfl/error.hpp"
#include "cranfl/experiment.hpp"
#include "cranfl/flsim.hpp"
#include "cranfl/optimizer.hpp"
#include "cranfl/quantization.hpp"

using namespace cranfl;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool ok = v.pass && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %d %s: %s; runtime %.2f s (limit %.0f s)%s\n", ok ? "PASS" : "FAIL", id, name,
              v.detail.c_str(), secs, limit_s, in_time ? "" : " EXCEEDED");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Small feasible scenario with random sizes and budgets.
Scenario random_scenario(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kpick(0, 2), mpick(1, 3), extra(0, 24);
  const int K = 1 << kpick(rng);  // 1, 2, 4
  const int M = mpick(rng);
  const int N = 4 * K;
  Scenario s = Scenario::defaults();
  s.K = K;
  s.M = M;
  s.N = N;
  s.noise_var.assign(static_cast<std::size_t>(M) * N, dbm_to_watt(-174.0) * s.bandwidth_hz / N);
  s.p_bar.assign(K, dbm_to_watt(23.0));
  s.g_bar.clear();
  for (int m = 0; m < M; ++m) s.g_bar.push_back(2.0 * s.bandwidth_hz * (N + extra(rng)) / N);
  s.p_fl.assign(M, 1e-10);
  s.sc_map = equal_sc_map(K, N);
  s.conv.K = K;
  s.conv.K_bar = std::max(1, K / 2);
  s.conv.sigma_k.assign(K, 1.0);
  return s;
}

ChannelRealization draw_channel(const Scenario& s, std::mt19937_64& rng) {
  Rng r(rng());
  const Topology t = sample_topology(s, r);
  return sample_channels(s, t, r);
}

// One device, given RRH count, N subcarriers, C_bar bits per RRH, and |h|^2 drawn
// log-uniformly so that both noise-limited and quantization-limited links occur.
Scenario one_device(int M, int N, int bits) {
  Scenario s = Scenario::defaults();
  s.K = 1;
  s.M = M;
  s.N = N;
  s.noise_var.assign(static_cast<std::size_t>(M) * N, dbm_to_watt(-174.0) * s.bandwidth_hz / N);
  s.p_bar = {dbm_to_watt(23.0)};
  s.g_bar.assign(M, 2.0 * s.bandwidth_hz * bits / N);
  s.p_fl.assign(M, 1e-10);
  s.sc_map = equal_sc_map(1, N);
  s.conv.K = 1;
  s.conv.K_bar = 1;
  s.conv.sigma_k = {1.0};
  return s;
}

ChannelRealization gains_channel(const Scenario& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> logg(-12.0, -8.0);
  ChannelRealization ch;
  ch.M = s.M;
  ch.K = s.K;
  ch.N = s.N;
  ch.positions.devices.resize(s.K);
  ch.positions.rrhs.resize(s.M);
  for (int i = 0; i < s.M * s.K * s.N; ++i) ch.h.emplace_back(std::sqrt(std::pow(10.0, logg(rng))), 0.0);
  return ch;
}

Verdict quantizer_suite() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(2, 8), bits(1, 12);
  const int draws = 10000;
  int mean_ok = 0, err_ok = 0, coords = 0;
  double worst_ratio = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    std::vector<double> w(dim(rng));
    for (double& x : w) x = u(rng);
    const int c = bits(rng);
    std::vector<double> sum(w.size(), 0.0), sq(w.size(), 0.0);
    double err = 0.0;
    Rng qrng(rng());
    for (int i = 0; i < draws; ++i) {
      const auto q = quantize_vector(w, c, qrng);
      for (std::size_t j = 0; j < w.size(); ++j) {
        sum[j] += q.values[j];
        sq[j] += q.values[j] * q.values[j];
        err += (q.values[j] - w[j]) * (q.values[j] - w[j]);
      }
    }
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double mean = sum[j] / draws;
      const double sd = std::sqrt(std::max(sq[j] / draws - mean * mean, 0.0));
      ++coords;
      if (std::abs(mean - w[j]) <= 4.0 * sd / std::sqrt(draws) + 1e-12) ++mean_ok;
    }
    const double ratio = err / draws / lemma1_error_bound(w, c);
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio <= 1.05) ++err_ok;
  }
  return {mean_ok == coords && err_ok == 100,
          std::to_string(mean_ok) + "/" + std::to_string(coords) +
              " coordinate means within 4 sd/sqrt(N); " + std::to_string(err_ok) +
              "/100 pairs with squared error <= 1.05 x bound (worst ratio " +
              fmt("%.4f", worst_ratio) + ")"};
}

Verdict inversion_identity() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int tested = 0;
  while (tested < 1000) {
    ConvergenceConstants c;
    c.K = 2 + static_cast<int>(30 * u(rng));
    c.K_bar = 1 + static_cast<int>((c.K - 1) * u(rng));
    c.sigma_k.assign(c.K, 2.0 * u(rng));
    c.mu = 0.05 + 0.9 * u(rng);
    c.L = c.mu * (1.0 + 5.0 * u(rng));
    c.beta = (1.01 + 4.0 * u(rng)) / c.mu;
    c.gamma = 0.1 + 10.0 * u(rng);
    c.G = u(rng);
    c.W_bound = u(rng);
    c.eps_skew = u(rng);
    c.d = 1.0 + 1e6 * u(rng);
    c.I = 1 + static_cast<int>(10 * u(rng));
    c.eps_target = std::pow(10.0, -4.0 + 3.0 * u(rng));
    const int cp = 1 + static_cast<int>(32 * u(rng)) % 32;
    const double T = rounds_for_accuracy(c, cp);
    if (!(T >= 0.0)) continue;
    ++tested;
    worst = std::max(worst, std::abs(theorem1_bound(c, cp, T) / c.eps_target - 1.0));
  }
  return {worst <= 1e-9, "1000 constant sets, worst relative error " + fmt("%.3e", worst)};
}

Verdict subsolver_oracles() {
  std::mt19937_64 rng(33);
  const OptimizerConfig cfg;

  // (a) power step against a 200 x 200 grid.
  int fp_ok = 0;
  double fp_worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Scenario s = one_device(1 + rep % 3, 2, 16);
    const ChannelRealization ch = gains_channel(s, rng);
    const Allocation a = equal_allocation(s, 10);
    const double y = fp_y_update(s, ch, a, 0);
    const std::vector<double> ys{y};
    Allocation opt = a;
    opt.p = fp_power_step(s, ch, a, ys, cfg);
    const double got = 2.0 * y * std::sqrt(fp_numerator(s, ch, opt, 0)) - y * y * fp_denominator(s, opt, 0);
    const double payload = fp_denominator(s, a, 0) / s.p_bar[0];
    double best = -std::numeric_limits<double>::infinity();
    Allocation g = a;
    for (int i = 0; i <= 200; ++i) {
      for (int j = 0; i + j <= 200; ++j) {
        g.power(0, 0) = s.p_bar[0] * i / 200.0;
        g.power(0, 1) = s.p_bar[0] * j / 200.0;
        const double A = fp_numerator(s, ch, g, 0);
        best = std::max(best, 2.0 * y * std::sqrt(A) - y * y * payload * (g.power(0, 0) + g.power(0, 1)));
      }
    }
    const double shortfall = (best - got) / std::abs(best);
    fp_worst = std::max(fp_worst, shortfall);
    if (shortfall <= 1e-3) ++fp_ok;
  }

  // (b) SCA plus rounding against integer enumeration, C_bar = 4.
  int sca_ok = 0;
  double sca_worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Scenario s = one_device(1, 2, 4);
    const ChannelRealization ch = gains_channel(s, rng);
    Allocation a = equal_allocation(s, 10);
    a.c_bits = sca_fronthaul(s, ch, a, cfg);
    const double got = expected_total_energy(s, ch, a).total;
    double best = std::numeric_limits<double>::infinity();
    Allocation e = a;
    for (int c1 = 1; c1 <= 3; ++c1) {
      for (int c2 = 1; c1 + c2 <= 4; ++c2) {
        e.c_bits = {c1, c2};
        best = std::min(best, expected_total_energy(s, ch, e).total);
      }
    }
    const double excess = got / best - 1.0;
    sca_worst = std::max(sca_worst, excess);
    if (excess <= 0.05 && check_feasible(s, a).empty()) ++sca_ok;
  }

  // (c) precision search against the 32-point brute force.
  int prec_ok = 0;
  const Scenario d = Scenario::defaults();
  for (int rep = 0; rep < 10; ++rep) {
    const ChannelRealization ch = draw_channel(d, rng);
    Allocation a = equal_allocation(d, 16);
    int best_c = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int c = 1; c <= d.chip.c_max; ++c) {
      a.c_prec = c;
      const double e = expected_total_energy(d, ch, a).total;
      if (e < best) {
        best = e;
        best_c = c;
      }
    }
    if (optimize_precision(d, ch, a) == best_c) ++prec_ok;
  }

  return {fp_ok == 50 && sca_ok == 50 && prec_ok == 10,
          "(a) " + std::to_string(fp_ok) + "/50 within 1e-3 of grid (worst shortfall " +
              fmt("%.2e", fp_worst) + "); (b) " + std::to_string(sca_ok) +
              "/50 within 5% of enumeration (worst excess " + fmt("%.4f", sca_worst) + "); (c) " +
              std::to_string(prec_ok) + "/10 equal to brute force"};
}

Verdict monotone_descent() {
  std::mt19937_64 rng(44);
  const OptimizerConfig cfg;
  const double slack = 1e-9;
  int fp_bad = 0, sca_bad = 0, outer_bad = 0, fp_steps = 0, sca_steps = 0, outer_steps = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Scenario s = random_scenario(rng);
    const ChannelRealization ch = draw_channel(s, rng);
    const OptimizationTrace tr = alternating_optimize(s, ch, initial_allocation(s), cfg);
    for (const auto& f : tr.fp_inner) {
      for (std::size_t i = 1; i < f.size(); ++i, ++fp_steps) {
        if (f[i] < f[i - 1] - slack * std::abs(f[i - 1])) ++fp_bad;
      }
    }
    for (const auto& e : tr.sca_inner) {
      for (std::size_t i = 1; i < e.size(); ++i, ++sca_steps) {
        if (e[i] > e[i - 1] + slack * std::abs(e[i - 1])) ++sca_bad;
      }
    }
    for (std::size_t i = 1; i < tr.outer.size(); ++i, ++outer_steps) {
      const double prev = tr.outer[i - 1].objective;
      if (std::isfinite(prev) && tr.outer[i].objective > prev + slack * std::abs(prev)) ++outer_bad;
    }
  }
  return {fp_bad == 0 && sca_bad == 0 && outer_bad == 0,
          "violations: FP " + std::to_string(fp_bad) + "/" + std::to_string(fp_steps) + ", SCA " +
              std::to_string(sca_bad) + "/" + std::to_string(sca_steps) + ", outer " +
              std::to_string(outer_bad) + "/" + std::to_string(outer_steps)};
}

Verdict baseline_dominance() {
  Config cfg = parse_config("");
  cfg.experiment.axis = SweepAxis::kGBar;
  cfg.experiment.sweep_values = {0.8e9, 1.2e9, 1.6e9, 2.0e9};
  cfg.experiment.realizations = 20;
  cfg.experiment.seed = 2026;
  const ResultTable t = run_experiment(cfg);
  bool ok = true;
  std::ostringstream detail;
  const std::size_t schemes = cfg.experiment.schemes.size();
  for (std::size_t i = 0; i < cfg.experiment.sweep_values.size(); ++i) {
    const auto* row = &t.rows[i * schemes];
    detail << (i ? "; " : "") << "G_bar=" << row[0].sweep_label << ":";
    for (std::size_t s = 0; s < schemes; ++s) {
      detail << ' ' << row[s].scheme << '=' << fmt("%.4g", row[s].mean_total_J);
      if (row[s].failed > 0) ok = false;
    }
    for (std::size_t s = 1; s < schemes; ++s) ok = ok && row[0].mean_total_J <= row[s].mean_total_J;
    for (std::size_t s = 1; s <= 3; ++s) ok = ok && row[s].mean_total_J <= row[4].mean_total_J;
  }
  return {ok, detail.str() + " J"};
}

Verdict precision_shape() {
  Config cfg = parse_config("");
  cfg.experiment.axis = SweepAxis::kCPrec;
  cfg.experiment.sweep_values.clear();
  for (int c = 1; c <= 32; ++c) cfg.experiment.sweep_values.push_back(c);
  cfg.experiment.realizations = 5;
  cfg.experiment.seed = 2026;
  cfg.experiment.schemes = {"joint"};
  const ResultTable t = run_experiment(cfg);
  std::vector<double> f;
  for (const auto& r : t.rows) f.push_back(r.mean_total_J);
  const int c_star = 1 + static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
  const bool ok = f.front() > f[c_star - 1] && f.back() > f[c_star - 1] && c_star >= 8 && c_star <= 24;
  const bool near_reference = c_star >= 11 && c_star <= 21;
  return {ok, "c* = " + std::to_string(c_star) + ", f(1) = " + fmt("%.4g", f.front()) +
                  " J, f(c*) = " + fmt("%.4g", f[c_star - 1]) + " J, f(32) = " +
                  fmt("%.4g", f.back()) + " J; reference 15-17 +/- 4 bits " +
                  (near_reference ? "met" : "not met") + " (not gated)"};
}

Verdict fl_simulator() {
  const FLSpec spec;
  const SyntheticTask task = make_fl_task(spec);
  const int seeds = 50;

  std::vector<double> means;
  std::vector<std::vector<double>> finals;
  double worst_exceed = 0.0;
  for (int c : {2, 4, 8, 16}) {
    FLRunConfig run = spec.run;
    run.c_prec = c;
    const BoundReport r = bound_check(task, run, seeds);
    finals.emplace_back();
    for (const auto& tr : r.traces) finals.back().push_back(tr.loss_gap.back());
    double m = 0.0;
    for (double g : finals.back()) m += g;
    means.push_back(m / seeds);
    worst_exceed = std::max(worst_exceed, r.exceedance);
  }
  bool monotone = true;
  std::ostringstream steps;
  for (std::size_t i = 1; i < means.size(); ++i) {
    monotone = monotone && means[i] <= means[i - 1];
    // Paired over seeds, which share sampling streams across precisions.
    double sq = 0.0;
    const double diff = means[i] - means[i - 1];
    for (int s = 0; s < seeds; ++s) {
      const double e = finals[i][s] - finals[i - 1][s] - diff;
      sq += e * e;
    }
    const double se = std::sqrt(sq / (seeds - 1) / seeds);
    steps << (i > 1 ? ", " : "") << fmt("%+.2e", diff) << " (se " << fmt("%.1e", se) << ")";
  }

  FLRunConfig full = spec.run;
  full.c_prec = full.c_max;
  full.K_bar = task.devices();
  full.rounds = 200;
  const auto traces = run_fl_seeds(task, full, seeds);
  int converged = 0;
  double worst_ratio = 0.0;
  for (const auto& tr : traces) {
    const double ratio = tr.loss_gap.back() / tr.loss_gap.front();
    worst_ratio = std::max(worst_ratio, ratio);
    if (!tr.diverged && ratio < 1e-3) ++converged;
  }

  std::ostringstream d;
  d << "(a) mean final gap at c_prec 2/4/8/16 = " << fmt("%.4e", means[0]) << '/'
    << fmt("%.4e", means[1]) << '/' << fmt("%.4e", means[2]) << '/' << fmt("%.4e", means[3])
    << (monotone ? " nonincreasing" : " NOT nonincreasing") << ", paired steps " << steps.str()
    << "; (b) " << converged
    << "/50 seeds below 1e-3 of initial gap at T = 200 (worst ratio " << fmt("%.2e", worst_ratio)
    << "); (c) worst exceedance fraction " << fmt("%.4f", worst_exceed);
  return {monotone && converged == seeds && worst_exceed <= 0.05, d.str()};
}

Verdict determinism() {
  Config cfg = parse_config(R"({
    "scenario": {"K": 4, "M": 2, "N": 16},
    "convergence": {"K_bar": 3},
    "experiment": {"sweep_axis": "G_bar", "sweep_values": [0.8e9, 1.6e9], "realizations": 4,
                   "seed": 99}
  })");
  std::ostringstream a, b, c;
  cfg.experiment.threads = 1;
  write_result_csv(a, run_experiment(cfg));
  write_result_csv(b, run_experiment(cfg));
  cfg.experiment.threads = 4;
  write_result_csv(c, run_experiment(cfg));

  FLSpec spec;
  spec.run.rounds = 20;
  const SyntheticTask task = make_fl_task(spec);
  std::ostringstream f1, f2;
  const auto t1 = run_fl_seeds(task, spec.run, 4, 1);
  const auto t2 = run_fl_seeds(task, spec.run, 4, 3);
  write_trace_csv(f1, t1);
  write_trace_csv(f2, t2);
  const bool sweep_ok = a.str() == b.str() && a.str() == c.str();
  const bool fl_ok = f1.str() == f2.str();
  return {sweep_ok && fl_ok,
          std::string("sweep CSV ") + (sweep_ok ? "identical" : "DIFFERS") +
              " across repeated runs and worker counts; FL trace CSV " +
              (fl_ok ? "identical" : "DIFFERS") + " across worker counts"};
}

}  // namespace

int main() {
  run(1, "quantizer unbiasedness and error bound", 30, quantizer_suite);
  run(2, "bound inversion identity", 1, inversion_identity);
  run(3, "subsolver oracles", 120, subsolver_oracles);
  run(4, "monotone descent", 300, monotone_descent);
  run(5, "joint scheme dominates baselines across fronthaul budgets", 900, baseline_dominance);
  run(6, "energy versus precision has an interior minimum", 300, precision_shape);
  run(7, "FL simulator trends and bound check", 600, fl_simulator);
  run(8, "determinism", 120, determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
