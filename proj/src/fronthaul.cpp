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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "cranfl/error.hpp"
#include "cranfl/optimizer.hpp"

namespace cranfl {

namespace {

constexpr int kMaxBoxBits = 500;  // keeps 2^(2 C) finite in double
constexpr double kMinPsi = 4.0;

// Transmission energy as a function of psi with powers frozen. Device k pays
// W_k / rate_k(psi) with W_k = payload_k * sum_n p_{k,n}; RRH m pays
// coef_{m,n} log2 psi_{m,n} with coef = payload of the SC owner times P_fl,m.
class PsiModel {
 public:
  PsiModel(const Scenario& scn, const ChannelRealization& ch, const Allocation& alloc)
      : M_(scn.M), N_(scn.N), K_(scn.K), sc_bandwidth_(scn.bandwidth_hz / scn.N),
        sc_map_(scn.sc_map) {
    const std::size_t size = static_cast<std::size_t>(M_) * N_;
    signal_.resize(size);
    qnoise_.resize(size);
    sigma2_.resize(size);
    coef_.resize(size);
    owner_.resize(N_);
    weight_.assign(K_, 0.0);
    for (int k = 0; k < K_; ++k) {
      const double payload = payload_bits(scn.chip_for(k), alloc.c_prec);
      for (int n : sc_map_[k]) {
        owner_[n] = k;
        weight_[k] += payload * alloc.power(k, n);
      }
    }
    for (int m = 0; m < M_; ++m) {
      for (int n = 0; n < N_; ++n) {
        const int k = owner_[n];
        const std::size_t i = static_cast<std::size_t>(m) * N_ + n;
        const double gp = ch.gain2(m, k, n) * alloc.power(k, n);
        signal_[i] = gp;
        sigma2_[i] = scn.noise(m, n);
        qnoise_[i] = 3.0 * (gp + sigma2_[i]);
        coef_[i] = scn.p_fl[m] * payload_bits(scn.chip_for(k), alloc.c_prec);
      }
    }
  }

  int M() const { return M_; }
  int N() const { return N_; }
  double coef(std::size_t i) const { return coef_[i]; }

  double device_rate(int k, std::span<const double> psi) const {
    double r = 0.0;
    for (int n : sc_map_[k]) r += std::log2(1.0 + sc_sinr(n, psi));
    return sc_bandwidth_ * r;
  }

  double device_energy(int k, std::span<const double> psi) const {
    if (weight_[k] == 0.0) return 0.0;
    const double r = device_rate(k, psi);
    if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
    return weight_[k] / r;
  }

  double rrh_energy(std::span<const double> psi) const {
    double e = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) e += coef_[i] * std::log2(psi[i]);
    return e;
  }

  double energy(std::span<const double> psi) const {
    double e = rrh_energy(psi);
    for (int k = 0; k < K_; ++k) e += device_energy(k, psi);
    return e;
  }

  // Gradient of the device part only.
  void device_gradient(std::span<const double> psi, std::span<double> out) const {
    for (int k = 0; k < K_; ++k) {
      const double r = device_rate(k, psi);
      const double scale =
          weight_[k] == 0.0 ? 0.0 : -weight_[k] / (r * r) * sc_bandwidth_ / std::numbers::ln2;
      for (int n : sc_map_[k]) {
        const double s = sc_sinr(n, psi);
        for (int m = 0; m < M_; ++m) {
          const std::size_t i = static_cast<std::size_t>(m) * N_ + n;
          const double den = sigma2_[i] * psi[i] + qnoise_[i];
          const double ds = signal_[i] * qnoise_[i] / (den * den);
          out[i] = scale * ds / (1.0 + s);
        }
      }
    }
  }

  // Device energy for a single device under integer bits.
  double device_energy_bits(int k, std::span<const int> bits) const {
    if (weight_[k] == 0.0) return 0.0;
    double r = 0.0;
    for (int n : sc_map_[k]) {
      double s = 0.0;
      for (int m = 0; m < M_; ++m) {
        const std::size_t i = static_cast<std::size_t>(m) * N_ + n;
        const double z = std::ldexp(1.0, -2 * bits[i]);
        s += signal_[i] / (sigma2_[i] + qnoise_[i] * z);
      }
      r += std::log2(1.0 + s);
    }
    r *= sc_bandwidth_;
    if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
    return weight_[k] / r;
  }

  double energy_bits(std::span<const int> bits) const {
    double e = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) e += 2.0 * coef_[i] * bits[i];
    for (int k = 0; k < K_; ++k) e += device_energy_bits(k, bits);
    return e;
  }

  int owner(int n) const { return owner_[n]; }

 private:
  double sc_sinr(int n, std::span<const double> psi) const {
    double s = 0.0;
    for (int m = 0; m < M_; ++m) {
      const std::size_t i = static_cast<std::size_t>(m) * N_ + n;
      s += signal_[i] / (sigma2_[i] + qnoise_[i] / psi[i]);
    }
    return s;
  }

  int M_, N_, K_;
  double sc_bandwidth_;
  std::vector<std::vector<int>> sc_map_;
  std::vector<double> signal_, qnoise_, sigma2_, coef_;  // (m, n) row-major
  std::vector<int> owner_;
  std::vector<double> weight_;
};

// Device energy plus the RRH energy linearized at psi_tilde.
class Surrogate {
 public:
  Surrogate(const PsiModel& model, std::span<const double> psi_tilde, int K)
      : model_(model), slope_(psi_tilde.size()), K_(K) {
    for (std::size_t i = 0; i < psi_tilde.size(); ++i) {
      slope_[i] = model.coef(i) / (psi_tilde[i] * std::numbers::ln2);
      offset_ += model.coef(i) * std::log2(psi_tilde[i]) - slope_[i] * psi_tilde[i];
    }
  }

  double value(std::span<const double> psi) const {
    double e = offset_;
    for (std::size_t i = 0; i < psi.size(); ++i) e += slope_[i] * psi[i];
    for (int k = 0; k < K_; ++k) e += model_.device_energy(k, psi);
    return e;
  }

  void gradient(std::span<const double> psi, std::span<double> out) const {
    model_.device_gradient(psi, out);
    for (std::size_t i = 0; i < psi.size(); ++i) out[i] += slope_[i];
  }

 private:
  const PsiModel& model_;
  std::vector<double> slope_;
  double offset_ = 0.0;
  int K_;
};

// min grad . s over {lo <= s_n <= hi_m, sum_n w_n s_n <= cap_m} for each RRH.
void knapsack_oracle(std::span<const double> grad, std::span<const double> weight,
                     std::span<const double> cap, std::span<const double> hi, int M,
                     int N, std::span<double> out) {
  std::vector<int> order;
  order.reserve(N);
  for (int m = 0; m < M; ++m) {
    const std::size_t base = static_cast<std::size_t>(m) * N;
    double budget = cap[m];
    order.clear();
    for (int n = 0; n < N; ++n) {
      out[base + n] = kMinPsi;
      budget -= weight[base + n] * kMinPsi;
      if (grad[base + n] < 0.0) order.push_back(n);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return grad[base + a] / weight[base + a] < grad[base + b] / weight[base + b];
    });
    for (int n : order) {
      if (budget <= 0.0) break;
      const std::size_t i = base + n;
      const double room = std::min(hi[m] - kMinPsi, budget / weight[i]);
      out[i] = kMinPsi + room;
      budget -= room * weight[i];
    }
  }
}

double box_upper(const Scenario& scn, int m) {
  return std::ldexp(1.0, 2 * std::min(scn.bit_budget(m), kMaxBoxBits));
}

// Frank-Wolfe on the surrogate at psi_tilde, started from psi_tilde.
std::vector<double> solve_surrogate(const Scenario& scn, const Surrogate& sur,
                                    std::span<const double> psi_tilde,
                                    const OptimizerConfig& cfg) {
  const int M = scn.M, N = scn.N;
  const std::size_t size = psi_tilde.size();
  std::vector<double> weight(size), cap(M), hi(M);
  for (int m = 0; m < M; ++m) {
    double log_sum = 0.0;
    for (int n = 0; n < N; ++n) {
      const std::size_t i = static_cast<std::size_t>(m) * N + n;
      weight[i] = 1.0 / psi_tilde[i];
      log_sum += std::log2(psi_tilde[i]);
    }
    cap[m] = std::numbers::ln2 * (2.0 * scn.bit_budget(m) - log_sum) + N;
    hi[m] = box_upper(scn, m);
  }

  std::vector<double> psi(psi_tilde.begin(), psi_tilde.end());
  std::vector<double> grad(size), vertex(size), dir(size), trial(size);
  double f = sur.value(psi);
  auto along = [&](double g) {
    for (std::size_t i = 0; i < size; ++i) trial[i] = psi[i] + g * dir[i];
    return sur.value(trial);
  };

  for (int it = 0; it < cfg.fw_max_iter; ++it) {
    sur.gradient(psi, grad);
    knapsack_oracle(grad, weight, cap, hi, M, N, vertex);
    double gap = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      dir[i] = vertex[i] - psi[i];
      gap -= grad[i] * dir[i];
    }
    if (!(gap > cfg.fw_tol * std::abs(f))) break;

    // Golden-section search on [0, 1]; the surrogate is convex along dir.
    constexpr double kInvPhi = 0.6180339887498949;
    double a = 0.0, b = 1.0;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = along(x1), f2 = along(x2);
    for (int ls = 0; ls < cfg.line_search_iter; ++ls) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = along(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = along(x2);
      }
    }
    double g_best = f1 <= f2 ? x1 : x2;
    double f_best = std::min(f1, f2);
    const double f_end = along(1.0);
    if (f_end < f_best) {
      g_best = 1.0;
      f_best = f_end;
    }
    if (!(f_best < f)) break;
    for (std::size_t i = 0; i < size; ++i) {
      psi[i] = std::clamp(psi[i] + g_best * dir[i], kMinPsi, hi[i / N]);
    }
    f = sur.value(psi);
  }
  return psi;
}

std::vector<double> psi_from_bits(const Scenario& scn, std::span<const int> bits) {
  std::vector<double> psi(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const int m = static_cast<int>(i) / scn.N;
    psi[i] = std::min(std::ldexp(1.0, 2 * bits[i]), box_upper(scn, m));
  }
  return psi;
}

// Lowers bits inside over-budget RRHs, each time picking the SC whose
// decrement raises the transmission energy least.
void repair_budget(const Scenario& scn, const PsiModel& model, std::vector<int>& bits) {
  for (int m = 0; m < scn.M; ++m) {
    const std::size_t base = static_cast<std::size_t>(m) * scn.N;
    long long used = 0;
    for (int n = 0; n < scn.N; ++n) used += bits[base + n];
    while (used > scn.bit_budget(m)) {
      int best = -1;
      double best_delta = std::numeric_limits<double>::infinity();
      for (int n = 0; n < scn.N; ++n) {
        const std::size_t i = base + n;
        if (bits[i] <= 1) continue;
        const int k = model.owner(n);
        const double before = model.device_energy_bits(k, bits);
        --bits[i];
        const double after = model.device_energy_bits(k, bits);
        ++bits[i];
        const double delta = after - before - 2.0 * model.coef(i);
        if (best < 0 || delta < best_delta) {
          best = n;
          best_delta = delta;
        }
      }
      if (best < 0) {
        throw Infeasible("sca_fronthaul: RRH " + std::to_string(m) +
                         " cannot fit one bit per subcarrier");
      }
      --bits[base + best];
      --used;
    }
  }
}

}  // namespace

double trans_energy_psi(const Scenario& scn, const ChannelRealization& ch,
                        const Allocation& alloc, std::span<const double> psi) {
  if (psi.size() != static_cast<std::size_t>(scn.M) * scn.N) {
    throw InvalidInput("trans_energy_psi: psi must be M x N");
  }
  return PsiModel(scn, ch, alloc).energy(psi);
}

double linearized_bits(int m, int N, std::span<const double> psi,
                       std::span<const double> psi_tilde) {
  double c = 0.0;
  for (int n = 0; n < N; ++n) {
    const std::size_t i = static_cast<std::size_t>(m) * N + n;
    c += std::log2(psi_tilde[i]) + (psi[i] - psi_tilde[i]) / (psi_tilde[i] * std::numbers::ln2);
  }
  return 0.5 * c;
}

std::vector<int> round_bits(std::span<const double> psi_tilde, int M, int N,
                            std::span<const double> beta) {
  if (psi_tilde.size() != static_cast<std::size_t>(M) * N ||
      beta.size() != static_cast<std::size_t>(M)) {
    throw InvalidInput("round_bits: shape mismatch");
  }
  std::vector<int> bits(psi_tilde.size());
  for (std::size_t i = 0; i < psi_tilde.size(); ++i) {
    if (!(psi_tilde[i] > 0.0)) throw DomainError("round_bits: psi must be positive");
    const double x = 0.5 * std::log2(psi_tilde[i]);
    const double lower = std::floor(x);
    const double c = (x - lower <= beta[i / N]) ? lower : lower + 1.0;
    bits[i] = std::max(1, static_cast<int>(c));
  }
  return bits;
}

std::vector<int> sca_fronthaul(const Scenario& scn, const ChannelRealization& ch,
                               const Allocation& alloc, const OptimizerConfig& cfg,
                               std::vector<double>* energy_trace) {
  for (int m = 0; m < scn.M; ++m) {
    if (scn.bit_budget(m) < scn.N) {
      throw Infeasible("sca_fronthaul: RRH " + std::to_string(m) + " has C_bar = " +
                       std::to_string(scn.bit_budget(m)) + " < N");
    }
  }
  const PsiModel model(scn, ch, alloc);
  std::vector<double> psi = psi_from_bits(scn, alloc.c_bits);
  double e = model.energy(psi);
  if (energy_trace) energy_trace->push_back(e);

  for (int it = 0; it < cfg.sca_max_iter; ++it) {
    const Surrogate sur(model, psi, scn.K);
    std::vector<double> next = solve_surrogate(scn, sur, psi, cfg);
    const double e_next = model.energy(next);
    if (!(e_next <= e)) break;
    psi = std::move(next);
    if (energy_trace) energy_trace->push_back(e_next);
    const bool done = e - e_next <= cfg.sca_tol * std::abs(e);
    e = e_next;
    if (done) break;
  }

  std::vector<double> beta(scn.M);
  for (int m = 0; m < scn.M; ++m) beta[m] = cfg.beta_for(m);
  std::vector<int> bits = round_bits(psi, scn.M, scn.N, beta);
  repair_budget(scn, model, bits);

  if (model.energy_bits(bits) <= model.energy_bits(alloc.c_bits)) return bits;
  return alloc.c_bits;
}

}  // namespace cranfl
