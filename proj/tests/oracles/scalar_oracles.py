#!/usr/bin/env python3
# Copyright 2026 The cranfl Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# =============================================================================
"""Independent scalar evaluations whose outputs are frozen into the C++ tests.

Run with `python3 tests/oracles/scalar_oracles.py`. Uses mpmath at 50 digits so
the printed values are not produced by the same double-precision code path the
library uses.
"""

from mpmath import mp, mpf, log, sqrt

mp.dps = 50


def grid(w, bits):
    mags = [abs(mpf(x)) for x in w]
    lo, hi = min(mags), max(mags)
    b = 2**bits - 1
    return [lo + i * (hi - lo) / b for i in range(b + 1)]


def e_mac(c, A=mpf("3.7e-12"), alpha=mpf("1.25"), cmax=32):
    return A * (mpf(c) / cmax) ** alpha


def e_compute_device(c, n_mac, n_w, o_s, A=mpf("3.7e-12"), alpha=mpf("1.25"),
                     cmax=32, u=64):
    em = e_mac(c, A, alpha, cmax)
    e_mb, e_lb = 2 * em, em
    root = sqrt(mpf(c) / (u * cmax))
    e_c = em * n_mac + 3 * o_s * e_mac(cmax, A, alpha, cmax)
    e_w = e_mb * n_w + e_lb * n_mac * root
    e_a = 2 * e_mb * o_s + e_lb * n_mac * root
    return e_c + e_w + e_a


def d_constant(c_prec, sigma=1, K=16, K_bar=10, I=5, G=mpf("0.02"),
               mu=mpf("0.89"), d=mpf("0.28e6"), eps=1, W=1):
    q = (2**c_prec - 1) ** 2
    t1 = K * mpf(sigma) ** 2 / K**2
    t2 = d * eps * W**2 * (1 - mu) / (4 * q)
    t3 = 4 * (I - 1) ** 2 * G**2
    t4 = 4 * d * eps * I**2 * G**2 / (K_bar * 4 * q)
    t5 = 4 * (K - K_bar) * I**2 * G**2 / (K_bar * (K - 1))
    return t1 + t2 + t3 + t4 + t5


def rounds(D, L=1, mu=mpf("0.89"), gamma=1, I=5, eps_target=mpf("0.01")):
    beta = 2 / mu
    return L * beta**2 * D / (2 * I * eps_target * (beta * mu - 1)) - mpf(gamma) / I


def main():
    print("grid([0.1,-0.9,0.4], 2) =", [mp.nstr(x, 20) for x in grid([0.1, -0.9, 0.4], 2)])

    sinr = mpf(1) / (1 + 3 * 2 * mpf(1) / 4)
    print("rate example SINR =", mp.nstr(sinr, 20), " log2(1+SINR) =", mp.nstr(log(1 + sinr, 2), 20))

    print("e_mac(16) =", mp.nstr(e_mac(16), 20))
    print("e_compute_device(N_mac=1, c=C_max) / A =",
          mp.nstr(e_compute_device(32, 1, 0, 0) / mpf("3.7e-12"), 20))
    print("e_compute_device(case1, c=16) =",
          mp.nstr(e_compute_device(16, mpf("0.37e6"), mpf("0.28e6"), 2266), 20))

    print("payload(0.28e6, 16) =", mp.nstr(mpf("0.28e6") * 16, 20))

    for eps, W in ((1, 1), (mpf("0.01"), 1)):
        D = d_constant(16, eps=eps, W=W)
        print(f"D(c=16, eps_skew={eps}, W={W}) =", mp.nstr(D, 20),
              " T =", mp.nstr(rounds(D), 20))
    D_inf = d_constant(10**6, I=1, K_bar=16)
    print("D(I=1, K_bar=K, c->inf) =", mp.nstr(D_inf, 20))

    print("lr(t=0) =", mp.nstr((2 / mpf("0.89")) / 1, 20))

    w = [mpf(0), mpf(1)]
    norm2 = sum(x * x for x in w)
    eps = (max(abs(x) for x in w) - min(abs(x) for x in w)) ** 2 / norm2
    print("lemma1([0,1], 1) =", mp.nstr(len(w) * eps * norm2 / (4 * (2**1 - 1) ** 2), 20))

    # Single device / single RRH / single SC transmission energy.
    # |h|^2 = 1e-9, p = 0.1 W, sigma2 = 1e-13 W, C = 3 bits, B = 1 MHz, N = 1,
    # payload = 1e6 bits, P_fl = 1e-9 W per bit/s.
    g, p, s2, C, B, N, payload, pfl = (mpf("1e-9"), mpf("0.1"), mpf("1e-13"), 3,
                                        mpf("1e6"), 1, mpf("1e6"), mpf("1e-9"))
    sinr = g * p / (s2 + 3 * (g * p + s2) * mpf(2) ** (-2 * C))
    rate = B / N * log(1 + sinr, 2)
    t1 = payload / rate
    G_m = 2 * B * C / N
    t2 = 2 * payload * C / G_m
    e = t1 * p + t2 * G_m * pfl
    print("single-link: rate =", mp.nstr(rate, 20), " T1 =", mp.nstr(t1, 20),
          " T2 =", mp.nstr(t2, 20), " E_trans =", mp.nstr(e, 20))


if __name__ == "__main__":
    main()
