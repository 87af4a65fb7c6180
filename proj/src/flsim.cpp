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

#include "cranfl/flsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "cranfl/error.hpp"
#include "cranfl/quantization.hpp"

namespace cranfl {

namespace {

double log1p_exp(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Per-sample gradient of the data term (no regularizer).
Eigen::VectorXd sample_gradient(const SyntheticTask& task, int k, int i,
                                const Eigen::VectorXd& w) {
  const auto x = task.features[k].row(i).transpose();
  const double y = task.labels[k](i);
  if (task.kind == TaskKind::kQuadratic) return (x.dot(w) - y) * x;
  return -y * sigmoid(-y * x.dot(w)) * x;
}

Eigen::MatrixXd data_hessian(const SyntheticTask& task, const Eigen::VectorXd& w) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(task.d, task.d);
  for (int k = 0; k < task.devices(); ++k) {
    const auto& X = task.features[k];
    if (task.kind == TaskKind::kQuadratic) {
      h += X.transpose() * X / X.rows();
    } else {
      const Eigen::VectorXd z = (X * w).cwiseProduct(task.labels[k]);
      Eigen::VectorXd s(z.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double p = sigmoid(z(i));
        s(i) = p * (1.0 - p);
      }
      h += X.transpose() * s.asDiagonal() * X / X.rows();
    }
  }
  return h / task.devices();
}

void solve_quadratic(SyntheticTask& task) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(task.d);
  for (int k = 0; k < task.devices(); ++k) {
    b += task.features[k].transpose() * task.labels[k] / task.samples(k);
  }
  b /= task.devices();
  const Eigen::MatrixXd data = data_hessian(task, Eigen::VectorXd::Zero(task.d));
  double jitter = 0.0;
  for (int attempt = 0; attempt < 20; ++attempt) {
    const Eigen::MatrixXd h =
        data + (task.mu_reg + jitter) * Eigen::MatrixXd::Identity(task.d, task.d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const double lo = eig.eigenvalues().minCoeff();
    if (eig.info() == Eigen::Success && lo > 1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
      task.mu_reg += jitter;
      task.w_star = h.ldlt().solve(b);
      task.mu = lo;
      task.L = eig.eigenvalues().maxCoeff();
      return;
    }
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
  }
  throw NumericalError("task_from_data: quadratic Hessian stays singular");
}

void solve_logistic(SyntheticTask& task) {
  if (!(task.mu_reg > 0.0)) throw InvalidInput("task_from_data: l2-logistic needs mu_reg > 0");
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(task.d, task.d);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(task.d);
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd g = task.global_gradient(w);
    if (g.norm() <= 1e-14 * std::max(1.0, w.norm())) break;
    const Eigen::VectorXd step = (data_hessian(task, w) + task.mu_reg * eye).ldlt().solve(g);
    double t = 1.0;
    const double f0 = task.global_loss(w);
    while (t > 1e-12 && task.global_loss(w - t * step) > f0 - 0.25 * t * g.dot(step)) t *= 0.5;
    w -= t * step;
  }
  task.w_star = w;
  task.mu = task.mu_reg;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(task.d, task.d);
  for (int k = 0; k < task.devices(); ++k) {
    gram += task.features[k].transpose() * task.features[k] / task.samples(k);
  }
  gram /= task.devices();
  task.L = 0.25 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff() +
           task.mu_reg;
}

// sup over probes of E_i ||grad f_k(w, i)||^2 and of the per-device variance.
void measure_gradients(SyntheticTask& task, Rng& rng, int probes) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double g2 = 0.0;
  std::vector<double> var(task.devices(), 0.0);
  for (int p = 0; p < probes; ++p) {
    const int k = p % task.devices();
    Eigen::VectorXd w(task.d);
    for (int j = 0; j < task.d; ++j) w(j) = unit(rng);
    const int n = task.samples(k);
    Eigen::MatrixXd grads(n, task.d);
    for (int i = 0; i < n; ++i) {
      grads.row(i) = (sample_gradient(task, k, i, w) + task.mu_reg * w).transpose();
    }
    const Eigen::RowVectorXd mean = grads.colwise().mean();
    g2 = std::max(g2, grads.rowwise().squaredNorm().mean());
    var[k] = std::max(var[k], (grads.rowwise() - mean).rowwise().squaredNorm().mean());
  }
  task.G = std::sqrt(g2);
  task.sigma_k.resize(task.devices());
  for (int k = 0; k < task.devices(); ++k) task.sigma_k[k] = std::sqrt(var[k]);
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

const char* task_kind_name(TaskKind kind) {
  return kind == TaskKind::kQuadratic ? "quadratic" : "l2-logistic";
}

TaskKind parse_task_kind(const std::string& name) {
  if (name == "quadratic") return TaskKind::kQuadratic;
  if (name == "l2-logistic" || name == "logistic") return TaskKind::kLogistic;
  throw InvalidInput("unknown task kind '" + name + "' (expected quadratic or l2-logistic)");
}

double SyntheticTask::local_loss(int k, const Eigen::VectorXd& w) const {
  const auto& X = features[k];
  const Eigen::VectorXd z = X * w;
  double data = 0.0;
  if (kind == TaskKind::kQuadratic) {
    data = 0.5 * (z - labels[k]).squaredNorm() / X.rows();
  } else {
    for (Eigen::Index i = 0; i < z.size(); ++i) data += log1p_exp(-labels[k](i) * z(i));
    data /= X.rows();
  }
  return data + 0.5 * mu_reg * w.squaredNorm();
}

Eigen::VectorXd SyntheticTask::local_gradient(int k, const Eigen::VectorXd& w,
                                              std::span<const int> rows) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  if (rows.empty()) {
    const auto& X = features[k];
    if (kind == TaskKind::kQuadratic) {
      g = X.transpose() * (X * w - labels[k]) / X.rows();
    } else {
      for (int i = 0; i < samples(k); ++i) g += sample_gradient(*this, k, i, w);
      g /= samples(k);
    }
  } else {
    for (int i : rows) g += sample_gradient(*this, k, i, w);
    g /= static_cast<double>(rows.size());
  }
  return g + mu_reg * w;
}

double SyntheticTask::global_loss(const Eigen::VectorXd& w) const {
  double f = 0.0;
  for (int k = 0; k < devices(); ++k) f += local_loss(k, w);
  return f / devices();
}

Eigen::VectorXd SyntheticTask::global_gradient(const Eigen::VectorXd& w) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < devices(); ++k) g += local_gradient(k, w);
  return g / devices();
}

SyntheticTask task_from_data(TaskKind kind, std::vector<Eigen::MatrixXd> features,
                             std::vector<Eigen::VectorXd> labels, double mu_reg, Rng& rng,
                             int probes) {
  if (features.empty() || features.size() != labels.size()) {
    throw InvalidInput("task_from_data: need one label vector per device");
  }
  if (!(mu_reg >= 0.0)) throw InvalidInput("task_from_data: mu_reg must be >= 0");
  SyntheticTask task;
  task.kind = kind;
  task.d = static_cast<int>(features[0].cols());
  task.mu_reg = mu_reg;
  for (std::size_t k = 0; k < features.size(); ++k) {
    if (features[k].cols() != task.d || features[k].rows() != labels[k].size() ||
        features[k].rows() == 0) {
      throw InvalidInput("task_from_data: device " + std::to_string(k) + " has mismatched data");
    }
  }
  task.features = std::move(features);
  task.labels = std::move(labels);
  if (kind == TaskKind::kQuadratic) {
    solve_quadratic(task);
  } else {
    solve_logistic(task);
  }
  task.f_star = task.global_loss(task.w_star);
  measure_gradients(task, rng, probes);
  return task;
}

SyntheticTask make_task(TaskKind kind, int K, int d, int samples_per_device, double mu_reg,
                        Rng& rng, double feature_var) {
  if (K < 1 || d < 1 || samples_per_device < 1 || !(mu_reg > 0.0) || !(feature_var > 0.0)) {
    throw InvalidInput("make_task: parameters must be positive");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> half(-0.5, 0.5);
  Eigen::VectorXd w_true(d);
  for (int j = 0; j < d; ++j) w_true(j) = half(rng);

  const double scale = std::sqrt(feature_var);
  std::vector<Eigen::MatrixXd> X(K);
  std::vector<Eigen::VectorXd> y(K);
  for (int k = 0; k < K; ++k) {
    X[k].resize(samples_per_device, d);
    y[k].resize(samples_per_device);
    for (int i = 0; i < samples_per_device; ++i) {
      for (int j = 0; j < d; ++j) X[k](i, j) = scale * normal(rng);
      const double score = X[k].row(i).dot(w_true) + 0.1 * normal(rng);
      y[k](i) = kind == TaskKind::kQuadratic ? score : (score >= 0.0 ? 1.0 : -1.0);
    }
  }
  return task_from_data(kind, std::move(X), std::move(y), mu_reg, rng);
}

void FLRunConfig::validate(const SyntheticTask& task) const {
  if (rounds < 0) throw InvalidInput("FLRunConfig: rounds must be >= 0");
  if (I < 0) throw InvalidInput("FLRunConfig: I must be >= 0");
  if (K_bar < 1 || K_bar > task.devices()) {
    throw InvalidInput("FLRunConfig: K_bar must lie in [1, K]");
  }
  if (c_prec < 1 || c_prec > c_max || c_max > kMaxQuantBits) {
    throw InvalidInput("FLRunConfig: c_prec must lie in [1, c_max]");
  }
  if (batch < 0) throw InvalidInput("FLRunConfig: batch must be >= 0");
  if (!(beta_for(task) > 0.0) || !(gamma_for(task) > 0.0)) {
    throw InvalidInput("FLRunConfig: learning-rate parameters must be positive");
  }
}

double FLRunConfig::beta_for(const SyntheticTask& task) const {
  return beta > 0.0 ? beta : 2.0 / task.mu;
}

double FLRunConfig::gamma_for(const SyntheticTask& task) const {
  return gamma > 0.0 ? gamma : beta_for(task) * task.L;
}

double FLRunConfig::learning_rate(const SyntheticTask& task, int t) const {
  return beta_for(task) / (static_cast<double>(t) * I + gamma_for(task));
}

Eigen::VectorXd local_sgd(const SyntheticTask& task, int k, const Eigen::VectorXd& w_start,
                          int c_prec, int I, double lr, int batch, Rng& rng, int c_max) {
  if (!all_finite(w_start)) throw Diverged("local_sgd: non-finite starting weights");
  Eigen::VectorXd w = w_start;
  std::vector<int> rows;
  const int n = task.samples(k);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int tau = 0; tau < I; ++tau) {
    const auto clipped = clip_weights(as_span(w));
    const Eigen::VectorXd wq = from_vector(quantize_vector(clipped, c_prec, rng, c_max).values);
    rows.clear();
    if (batch > 0 && batch < n) {
      for (int b = 0; b < batch; ++b) rows.push_back(pick(rng));
    }
    const Eigen::VectorXd g = task.local_gradient(k, wq, rows);
    w -= lr * g;
    if (!all_finite(w)) {
      throw Diverged("local_sgd: device " + std::to_string(k) + " diverged at step " +
                     std::to_string(tau));
    }
  }
  return w - w_start;
}

Eigen::VectorXd fl_round(const SyntheticTask& task, const Eigen::VectorXd& w_t,
                         const FLRunConfig& cfg, int t, Rng& rng, RoundStats* stats) {
  const int K = task.devices();
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < cfg.K_bar; ++i) {
    std::uniform_int_distribution<int> pick(i, K - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<std::uint64_t> device_seeds(cfg.K_bar);
  for (auto& s : device_seeds) s = rng();

  const double lr = cfg.learning_rate(task, t);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(task.d);
  if (stats) {
    stats->selected.assign(order.begin(), order.begin() + cfg.K_bar);
    stats->update_norms.clear();
  }
  for (int i = 0; i < cfg.K_bar; ++i) {
    Rng device_rng(device_seeds[i]);
    const Eigen::VectorXd update =
        local_sgd(task, order[i], w_t, cfg.c_prec, cfg.I, lr, cfg.batch, device_rng, cfg.c_max);
    if (stats) stats->update_norms.push_back(update.norm());
    sum += from_vector(quantize_vector(as_span(update), cfg.c_prec, device_rng, cfg.c_max).values);
  }
  return w_t + sum / K;
}

FLTrace run_fl(const SyntheticTask& task, const FLRunConfig& cfg) {
  cfg.validate(task);
  FLTrace trace;
  trace.c_prec = cfg.c_prec;
  trace.seed = cfg.seed;
  Rng rng = make_rng(cfg.seed, {});
  Eigen::VectorXd w = Eigen::VectorXd::Zero(task.d);
  trace.loss_gap.push_back(task.gap(w));
  RoundStats stats;
  for (int t = 0; t < cfg.rounds; ++t) {
    try {
      w = fl_round(task, w, cfg, t, rng, &stats);
    } catch (const Diverged&) {
      trace.diverged = true;
      break;
    }
    const double gap = task.gap(w);
    if (!std::isfinite(gap)) {
      trace.diverged = true;
      break;
    }
    trace.loss_gap.push_back(gap);
    trace.update_norms.push_back(stats.update_norms);
    trace.max_abs_weight = std::max(trace.max_abs_weight, w.cwiseAbs().maxCoeff());
  }
  trace.final_model = w;
  return trace;
}

std::vector<FLTrace> run_fl_seeds(const SyntheticTask& task, const FLRunConfig& cfg,
                                  int n_seeds, int threads) {
  if (n_seeds < 0) throw InvalidInput("run_fl_seeds: n_seeds must be >= 0");
  cfg.validate(task);
  std::vector<FLTrace> traces(n_seeds);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next++; s < n_seeds; s = next++) {
      FLRunConfig run = cfg;
      run.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(s)});
      traces[s] = run_fl(task, run);
    }
  };
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, n_seeds));
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return traces;
}

ConvergenceConstants task_constants(const SyntheticTask& task, const FLRunConfig& cfg,
                                    double w_bound) {
  ConvergenceConstants c;
  c.L = task.L;
  c.mu = task.mu;
  c.sigma_k = task.sigma_k;
  c.G = task.G;
  c.W_bound = w_bound;
  c.eps_skew = 1.0;
  c.d = task.d;
  c.beta = cfg.beta_for(task);
  c.gamma = cfg.gamma_for(task);
  c.I = cfg.I;
  c.K = task.devices();
  c.K_bar = cfg.K_bar;
  return c;
}

BoundReport bound_check(const SyntheticTask& task, const FLRunConfig& cfg, int n_seeds,
                        int threads) {
  BoundReport report;
  report.traces = run_fl_seeds(task, cfg, n_seeds, threads);
  double w_bound = 0.0;
  for (const auto& tr : report.traces) w_bound = std::max(w_bound, tr.max_abs_weight);
  report.constants = task_constants(task, cfg, w_bound);
  for (auto& tr : report.traces) {
    tr.bound.clear();
    for (std::size_t t = 0; t < tr.loss_gap.size(); ++t) {
      const double b = theorem1_bound(report.constants, cfg.c_prec, static_cast<double>(t));
      tr.bound.push_back(b);
      ++report.pairs;
      if (tr.loss_gap[t] > b) ++report.exceeded;
    }
  }
  report.exceedance =
      report.pairs > 0 ? static_cast<double>(report.exceeded) / report.pairs : 0.0;
  return report;
}

void write_trace_csv(std::ostream& out, std::span<const FLTrace> traces) {
  out << "round,loss_gap,bound_value,c_prec,seed\n";
  char buf[128];
  for (const auto& tr : traces) {
    for (std::size_t t = 0; t < tr.loss_gap.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%zu,%.10e,", t, tr.loss_gap[t]);
      out << buf;
      if (t < tr.bound.size()) {
        std::snprintf(buf, sizeof buf, "%.10e", tr.bound[t]);
        out << buf;
      }
      out << ',' << tr.c_prec << ',' << tr.seed << '\n';
    }
  }
}

}  // namespace cranfl
