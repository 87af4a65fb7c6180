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
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "cranfl/error.hpp"
#include "cranfl/optimizer.hpp"

namespace cranfl {

namespace {

// One device's subcarriers with the fronthaul resolution frozen. The per-RRH
// SINR is g x / (sigma^2 (1 + 3 z) + 3 g x z) with z = 2^(-2 C) = 1 / psi.
class DeviceRateModel {
 public:
  DeviceRateModel(const Scenario& scn, const ChannelRealization& ch,
                  const Allocation& alloc, int k)
      : sc_bandwidth_(scn.bandwidth_hz / scn.N), rrh_count_(scn.M) {
    for (int n : scn.sc_map[k]) {
      subcarriers_.push_back(n);
      for (int m = 0; m < scn.M; ++m) {
        gain_.push_back(ch.gain2(m, k, n));
        sigma2_.push_back(scn.noise(m, n));
        inv_psi_.push_back(std::ldexp(1.0, -2 * alloc.bits(m, n)));
      }
    }
  }

  std::size_t size() const { return subcarriers_.size(); }
  int subcarrier(std::size_t j) const { return subcarriers_[j]; }

  double rate(std::span<const double> x) const {
    double r = 0.0;
    for (std::size_t j = 0; j < size(); ++j) r += std::log2(1.0 + sinr(j, x[j]));
    return sc_bandwidth_ * r;
  }

  // d rate / d x_j.
  void rate_gradient(std::span<const double> x, std::span<double> out) const {
    for (std::size_t j = 0; j < size(); ++j) {
      double s = 0.0, ds = 0.0;
      for (int m = 0; m < rrh_count_; ++m) {
        const std::size_t i = j * rrh_count_ + m;
        const double g = gain_[i];
        const double base = sigma2_[i] * (1.0 + 3.0 * inv_psi_[i]);
        const double den = base + 3.0 * g * x[j] * inv_psi_[i];
        s += g * x[j] / den;
        ds += g * base / (den * den);
      }
      out[j] = sc_bandwidth_ / std::numbers::ln2 * ds / (1.0 + s);
    }
  }

 private:
  double sinr(std::size_t j, double x) const {
    if (x == 0.0) return 0.0;
    double s = 0.0;
    for (int m = 0; m < rrh_count_; ++m) {
      const std::size_t i = j * rrh_count_ + m;
      const double g = gain_[i];
      s += g * x / (sigma2_[i] * (1.0 + 3.0 * inv_psi_[i]) + 3.0 * g * x * inv_psi_[i]);
    }
    return s;
  }

  double sc_bandwidth_;
  int rrh_count_;
  std::vector<int> subcarriers_;
  std::vector<double> gain_, sigma2_, inv_psi_;  // (j, m) row-major
};

std::vector<double> device_powers(const Scenario& scn, const Allocation& alloc, int k) {
  std::vector<double> x;
  for (int n : scn.sc_map[k]) x.push_back(alloc.power(k, n));
  return x;
}

double device_energy(const Scenario& scn, const ChannelRealization& ch,
                     const Allocation& alloc) {
  double e = 0.0;
  for (int k = 0; k < scn.K; ++k) {
    const double b = fp_denominator(scn, alloc, k);
    if (b == 0.0) continue;
    const double a = fp_numerator(scn, ch, alloc, k);
    if (!(a > 0.0)) return std::numeric_limits<double>::infinity();
    e += b / a;
  }
  return e;
}

// Projected gradient ascent on 2 y sqrt(A(x)) - y^2 P sum(x) over the capped
// simplex, with backtracking on the standard sufficient-ascent condition.
std::vector<double> maximize_quadratic_transform(const DeviceRateModel& model,
                                                 double y, double payload, double cap,
                                                 std::vector<double> x,
                                                 const OptimizerConfig& cfg, int k) {
  const std::size_t n = x.size();
  auto objective = [&](std::span<const double> v) {
    const double a = model.rate(v);
    return 2.0 * y * std::sqrt(a) -
           y * y * payload * std::accumulate(v.begin(), v.end(), 0.0);
  };
  std::vector<double> grad(n), trial(n), step(n);
  double f = objective(x);
  double largest = 0.0;
  double t = 0.0;

  for (int it = 0; it < cfg.pgd_max_iter; ++it) {
    const double a = model.rate(x);
    if (!(a > 0.0)) {
      std::ostringstream msg;
      msg << "fp_power_step: device " << k << " has zero rate at iterate " << it
          << " (total power " << std::accumulate(x.begin(), x.end(), 0.0) << " W)";
      throw NumericalError(msg.str());
    }
    model.rate_gradient(x, grad);
    largest = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      grad[j] = y * grad[j] / std::sqrt(a) - y * y * payload;
      if (!std::isfinite(grad[j])) {
        std::ostringstream msg;
        msg << "fp_power_step: non-finite gradient for device " << k << " at SC "
            << model.subcarrier(j) << " (y = " << y << ", A = " << a << ")";
        throw NumericalError(msg.str());
      }
      largest = std::max(largest, std::abs(grad[j]));
    }
    if (largest == 0.0) break;
    if (t == 0.0) t = cap / largest;

    bool moved = false;
    double moved_norm = 0.0;
    double f_trial = f;
    for (int bt = 0; bt < 100; ++bt) {
      for (std::size_t j = 0; j < n; ++j) step[j] = x[j] + t * grad[j];
      trial = project_capped_simplex(step, cap);
      double lin = 0.0, sq = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = trial[j] - x[j];
        lin += grad[j] * d;
        sq += d * d;
      }
      moved_norm = std::sqrt(sq);
      if (moved_norm <= 1e-15 * cap) break;
      f_trial = objective(trial);
      if (f_trial >= f + lin - sq / (2.0 * t)) {
        moved = true;
        break;
      }
      t *= cfg.pgd_shrink;
    }
    if (!moved || f_trial < f) break;

    x = trial;
    f = f_trial;
    const double mapping = moved_norm / t;
    if (mapping * cap <= cfg.pgd_tol * std::max(std::abs(f), 1e-300)) break;
    t /= cfg.pgd_shrink;
  }
  return x;
}

}  // namespace

std::vector<double> project_capped_simplex(std::span<const double> v, double cap) {
  std::vector<double> x(v.begin(), v.end());
  double sum = 0.0;
  for (double& xi : x) {
    xi = std::max(xi, 0.0);
    sum += xi;
  }
  if (sum <= cap) return x;

  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double prefix = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    prefix += u[j];
    const double candidate = (prefix - cap) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::max(v[j] - theta, 0.0);
  return x;
}

double fp_numerator(const Scenario& scn, const ChannelRealization& ch,
                    const Allocation& alloc, int k) {
  return DeviceRateModel(scn, ch, alloc, k).rate(device_powers(scn, alloc, k));
}

double fp_denominator(const Scenario& scn, const Allocation& alloc, int k) {
  double p = 0.0;
  for (int n : scn.sc_map[k]) p += alloc.power(k, n);
  return payload_bits(scn.chip_for(k), alloc.c_prec) * p;
}

double fp_surrogate(const Scenario& scn, const ChannelRealization& ch,
                    const Allocation& alloc) {
  double s = 0.0;
  for (int k = 0; k < scn.K; ++k) {
    const double b = fp_denominator(scn, alloc, k);
    if (!(b > 0.0)) throw DomainError("fp_surrogate: device with zero power");
    s += fp_numerator(scn, ch, alloc, k) / b;
  }
  return s;
}

double fp_y_update(const Scenario& scn, const ChannelRealization& ch,
                   const Allocation& alloc, int k) {
  const double b = fp_denominator(scn, alloc, k);
  if (!(b > 0.0)) {
    throw DomainError("fp_y_update: device " + std::to_string(k) + " has zero power");
  }
  return std::sqrt(fp_numerator(scn, ch, alloc, k)) / b;
}

std::vector<double> fp_power_step(const Scenario& scn, const ChannelRealization& ch,
                                  const Allocation& alloc, std::span<const double> y,
                                  const OptimizerConfig& cfg) {
  if (static_cast<int>(y.size()) != scn.K) {
    throw InvalidInput("fp_power_step: y must have K entries");
  }
  std::vector<double> p = alloc.p;
  for (int k = 0; k < scn.K; ++k) {
    if (y[k] == 0.0) continue;
    const DeviceRateModel model(scn, ch, alloc, k);
    auto x = maximize_quadratic_transform(model, y[k],
                                          payload_bits(scn.chip_for(k), alloc.c_prec),
                                          scn.p_bar[k], device_powers(scn, alloc, k),
                                          cfg, k);
    for (std::size_t j = 0; j < x.size(); ++j) {
      p[static_cast<std::size_t>(k) * scn.N + model.subcarrier(j)] = x[j];
    }
  }
  return p;
}

std::vector<double> fp_power_allocation(const Scenario& scn, const ChannelRealization& ch,
                                        const Allocation& alloc, const OptimizerConfig& cfg,
                                        std::vector<double>* surrogate_trace) {
  Allocation work = alloc;
  double prev = fp_surrogate(scn, ch, work);
  if (surrogate_trace) surrogate_trace->push_back(prev);

  std::vector<double> y(scn.K);
  for (int it = 0; it < cfg.fp_max_iter; ++it) {
    for (int k = 0; k < scn.K; ++k) y[k] = fp_y_update(scn, ch, work, k);
    work.p = fp_power_step(scn, ch, work, y, cfg);
    const double cur = fp_surrogate(scn, ch, work);
    if (surrogate_trace) surrogate_trace->push_back(cur);
    if (std::abs(cur - prev) <= cfg.fp_tol * std::abs(prev)) break;
    prev = cur;
  }

  // Maximizing sum A/B only bounds the energy sum B/A from one side.
  if (device_energy(scn, ch, work) <= device_energy(scn, ch, alloc)) return work.p;
  return alloc.p;
}

}  // namespace cranfl
