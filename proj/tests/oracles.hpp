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

// oracles.hpp — Test-side oracles, independent of the library's
// implementation paths: naive dense Lindblad action, log-sum-exp moments of
// the steady-state weights, and seeded random-state generators.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qbcharge/lindblad.hpp"
#include "qbcharge/operators.hpp"

namespace oracles {

using qbcharge::Complex;
using qbcharge::Matrix;

// Plain dense evaluation of -i[H, rho] + sum rate (a rho a† - {a†a, rho}/2),
// no sparse mirrors involved.
inline Matrix naive_lindblad_rhs(const Matrix& h, const std::vector<std::pair<Matrix, double>>& jumps,
                                 const Matrix& rho) {
  const Complex mi(0.0, -1.0);
  Matrix out = mi * (h * rho - rho * h);
  for (const auto& [a, rate] : jumps) {
    const Matrix a_dag = a.adjoint();
    const Matrix a_dag_a = a_dag * a;
    out += rate * (a * rho * a_dag - 0.5 * (a_dag_a * rho + rho * a_dag_a));
  }
  return out;
}

// Moments of the weights e^{-beta m} / Z_N computed with a log-sum-exp
// shift in long double.
struct SteadyMoments {
  long double mean;
  long double variance;
};

inline SteadyMoments steady_moments_lse(double beta, int n) {
  const long double b = static_cast<long double>(beta);
  long double log_max = -b * n;  // beta < 0: the top weight dominates
  if (b > 0) log_max = 0.0L;
  long double z = 0.0L, s1 = 0.0L, s2 = 0.0L;
  for (int m = 0; m <= n; ++m) {
    const long double w = std::exp(-b * m - log_max);
    z += w;
    s1 += m * w;
    s2 += static_cast<long double>(m) * m * w;
  }
  const long double mean = s1 / z;
  return SteadyMoments{mean, s2 / z - mean * mean};
}

// Ginibre-induced random density matrix (full rank, strictly positive).
inline Matrix random_density(int dim, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

inline Matrix random_hermitian(int dim, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  return 0.5 * (g + g.adjoint()).eval();
}

inline Matrix random_matrix(int dim, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

}  // namespace oracles
