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

// Quantized federated averaging on synthetic strongly convex problems with a
// known optimum, used to measure the loss gap against the convergence bound.
//
// Each round samples K_bar of K devices without replacement. A device runs I
// SGD steps whose gradients are evaluated at the clipped, quantized weights,
// then uploads its quantized update; the server adds (1/K) times the sum.

#ifndef CRANFL_FLSIM_HPP
#define CRANFL_FLSIM_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cranfl/convergence.hpp"
#include "cranfl/random.hpp"

namespace cranfl {

enum class TaskKind { kQuadratic, kLogistic };

const char* task_kind_name(TaskKind kind);
TaskKind parse_task_kind(const std::string& name);

/// Per device k: f_k(w) = mean_i loss(x_i, y_i; w) + mu_reg / 2 ||w||^2 with
/// squared loss (quadratic) or log(1 + exp(-y x.w)) (l2-logistic, y = +-1).
/// The global loss is the plain mean of the f_k, matching the 1/K
/// aggregation weights.
struct SyntheticTask {
  TaskKind kind = TaskKind::kQuadratic;
  int d = 0;
  double mu_reg = 0.0;
  std::vector<Eigen::MatrixXd> features;  // per device, rows are samples
  std::vector<Eigen::VectorXd> labels;
  Eigen::VectorXd w_star;
  double f_star = 0.0;
  double L = 0.0;
  double mu = 0.0;
  double G = 0.0;                 // max sampled single-sample gradient norm
  std::vector<double> sigma_k;    // per-device single-sample gradient spread

  int devices() const { return static_cast<int>(features.size()); }
  int samples(int k) const { return static_cast<int>(features[k].rows()); }

  double local_loss(int k, const Eigen::VectorXd& w) const;
  /// Gradient over the given rows of device k; all rows when `rows` is empty.
  Eigen::VectorXd local_gradient(int k, const Eigen::VectorXd& w,
                                 std::span<const int> rows = {}) const;
  double global_loss(const Eigen::VectorXd& w) const;
  Eigen::VectorXd global_gradient(const Eigen::VectorXd& w) const;
  double gap(const Eigen::VectorXd& w) const { return global_loss(w) - f_star; }
};

/// Builds a task from given data: solves for w* (closed form or Newton),
/// certifies L and mu from Hessian eigenvalues, and measures G and sigma_k
/// from `probes` random weights in [-1, 1]^d.
SyntheticTask task_from_data(TaskKind kind, std::vector<Eigen::MatrixXd> features,
                             std::vector<Eigen::VectorXd> labels, double mu_reg, Rng& rng,
                             int probes = 10000);

/// Gaussian features with variance feature_var per entry. Quadratic labels
/// are x.w_true + noise, logistic labels the sign of a noisy score, with
/// w_true uniform in [-0.5, 0.5]^d.
SyntheticTask make_task(TaskKind kind, int K, int d, int samples_per_device, double mu_reg,
                        Rng& rng, double feature_var = 0.2);

struct FLRunConfig {
  int rounds = 100;
  int I = 5;
  int K_bar = 10;
  int c_prec = 16;
  int c_max = 32;
  int batch = 0;        // minibatch size; 0 means full local batch
  std::uint64_t seed = 1;
  double beta = 0.0;    // <= 0: 2 / mu of the task
  double gamma = 0.0;   // <= 0: beta * L of the task

  void validate(const SyntheticTask& task) const;
  double beta_for(const SyntheticTask& task) const;
  double gamma_for(const SyntheticTask& task) const;
  /// lambda_t = beta / (t I + gamma).
  double learning_rate(const SyntheticTask& task, int t) const;
};

/// I local steps from w_start at the fixed rate lr; returns w_I - w_start.
Eigen::VectorXd local_sgd(const SyntheticTask& task, int k, const Eigen::VectorXd& w_start,
                          int c_prec, int I, double lr, int batch, Rng& rng, int c_max = 32);

struct RoundStats {
  std::vector<int> selected;
  std::vector<double> update_norms;  // ||d_t^k|| before quantization
};

/// One round at index t. Draws the device subset and one seed per selected
/// device from `rng`, so the number of draws does not depend on c_prec.
Eigen::VectorXd fl_round(const SyntheticTask& task, const Eigen::VectorXd& w_t,
                         const FLRunConfig& cfg, int t, Rng& rng, RoundStats* stats = nullptr);

struct FLTrace {
  std::vector<double> loss_gap;       // rounds + 1 entries, index 0 is w_0
  std::vector<double> bound;          // theorem1_bound per entry, when computed
  std::vector<std::vector<double>> update_norms;
  Eigen::VectorXd final_model;
  double max_abs_weight = 0.0;        // over all global iterates
  int c_prec = 0;
  std::uint64_t seed = 0;
  bool diverged = false;
};

/// Starts from w_0 = 0. On divergence returns the trace so far with the flag set.
FLTrace run_fl(const SyntheticTask& task, const FLRunConfig& cfg);

/// n_seeds runs with seeds derived from cfg.seed, on up to `threads` workers
/// (0 = hardware concurrency). Output order follows the seed index.
std::vector<FLTrace> run_fl_seeds(const SyntheticTask& task, const FLRunConfig& cfg,
                                  int n_seeds, int threads = 0);

struct BoundReport {
  double exceedance = 0.0;  // fraction of (seed, round) pairs above the bound
  long long pairs = 0;
  long long exceeded = 0;
  ConvergenceConstants constants;
  std::vector<FLTrace> traces;  // with `bound` filled in
};

/// Constants for the bound: the task's L, mu, G, sigma_k, eps_skew = 1,
/// W_bound = `w_bound`, and the run's beta, gamma, I, K, K_bar.
ConvergenceConstants task_constants(const SyntheticTask& task, const FLRunConfig& cfg,
                                    double w_bound);

/// Runs n_seeds seeds and compares each round's gap with the bound, using
/// W_bound measured as the largest weight magnitude seen across the runs.
BoundReport bound_check(const SyntheticTask& task, const FLRunConfig& cfg, int n_seeds,
                        int threads = 0);

/// Columns round, loss_gap, bound_value, c_prec, seed. bound_value is empty
/// when the trace carries no bound.
void write_trace_csv(std::ostream& out, std::span<const FLTrace> traces);

}  // namespace cranfl

#endif  // CRANFL_FLSIM_HPP
