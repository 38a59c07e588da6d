// Copyright 2026 The qbcharge Authors
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

// rk45.hpp — Embedded Dormand–Prince 5(4) stepper with 4th-order dense
// output, generic over Eigen vector/matrix states.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbcharge::detail {

struct Rk45Options {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
};

// Scaled RMS of err against sc_i = atol + rtol * max(|y0_i|, |y1_i|).
template <class State>
double scaled_error_norm(const State& err, const State& y0, const State& y1, double atol,
                         double rtol) {
  const auto* e = err.data();
  const auto* a = y0.data();
  const auto* b = y1.data();
  const auto n = err.size();
  double acc = 0.0;
  for (decltype(err.size()) i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    const double q = std::abs(e[i]) / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

// Integrates y' = f(y) from t0 to t_end. `record_times` must be ascending
// and contained in [t0, t_end]; `record(t, y)` is called for each of them,
// evaluated through the continuous extension of the accepted steps.
template <class State, class Rhs, class Record>
void integrate_dopri5(Rhs&& f, State y, double t0, double t_end,
                      const std::vector<double>& record_times, Record&& record,
                      const Rk45Options& opt = {}) {
  // Dormand–Prince tableau.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  // b - b*: coefficients of the embedded error estimate.
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  // Dense-output coefficients (Hairer, Nørsett & Wanner).
  constexpr double d1 = -12715105075.0 / 11282082432.0;
  constexpr double d3 = 87487479700.0 / 32700410799.0;
  constexpr double d4 = -10690763975.0 / 1880347072.0;
  constexpr double d5 = 701980252875.0 / 199316789632.0;
  constexpr double d6 = -1453857185.0 / 822651844.0;
  constexpr double d7 = 69997945.0 / 29380423.0;

  const double atol = opt.abs_tol;
  const double rtol = opt.rel_tol;

  std::size_t ri = 0;
  const double span = t_end - t0;
  const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end));
  while (ri < record_times.size() && record_times[ri] <= t0 + t_eps) {
    record(record_times[ri], y);
    ++ri;
  }
  if (span <= 0.0) return;

  State k1 = f(y);

  // Initial step size (Hairer's heuristic).
  double h;
  {
    const auto* yp = y.data();
    const auto* kp = k1.data();
    double d0 = 0.0, dd1 = 0.0;
    const auto n = y.size();
    for (decltype(y.size()) i = 0; i < n; ++i) {
      const double sc = atol + rtol * std::abs(yp[i]);
      const double qy = std::abs(yp[i]) / sc;
      const double qk = std::abs(kp[i]) / sc;
      d0 += qy * qy;
      dd1 += qk * qk;
    }
    d0 = std::sqrt(d0 / static_cast<double>(n));
    dd1 = std::sqrt(dd1 / static_cast<double>(n));
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * (d0 / dd1);
    h0 = std::min(h0, span);
    State y1 = y + h0 * k1;
    State k2 = f(y1);
    double d2 = scaled_error_norm(State(k2 - k1), y, y, atol, rtol) / h0;
    double h1 = (std::max(dd1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                             : std::pow(0.01 / std::max(dd1, d2), 0.2);
    h = std::min({100.0 * h0, h1, span});
  }

  double t = t0;
  State k2, k3, k4, k5, k6, k7, ynew, yerr;
  while (t < t_end - t_eps) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("evolve: step size underflow at t = " + std::to_string(t));

    k2 = f(State(y + (h * a21) * k1));
    k3 = f(State(y + h * (a31 * k1 + a32 * k2)));
    k4 = f(State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    k5 = f(State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    k6 = f(State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    k7 = f(ynew);
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = scaled_error_norm(yerr, y, ynew, atol, rtol);

    if (err <= 1.0) {
      if (ri < record_times.size() && record_times[ri] <= t + h + t_eps) {
        // Continuous extension on [t, t+h].
        State rc2 = ynew - y;
        State rc3 = h * k1 - rc2;
        State rc4 = rc2 - h * k7 - rc3;
        State rc5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (ri < record_times.size() && record_times[ri] <= t + h + t_eps) {
          const double theta = std::clamp((record_times[ri] - t) / h, 0.0, 1.0);
          State yi = y + theta * (rc2 + (1.0 - theta) * (rc3 + theta * (rc4 + (1.0 - theta) * rc5)));
          record(record_times[ri], yi);
          ++ri;
        }
      }
      t += h;
      std::swap(y, ynew);
      std::swap(k1, k7);  // FSAL
      const double fac = (err == 0.0) ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      h *= fac;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
}

}  // namespace qbcharge::detail
