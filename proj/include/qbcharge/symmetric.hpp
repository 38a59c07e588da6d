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

// symmetric.hpp — The (N+1)-dimensional symmetric-subspace reduction:
// Dicke basis, the finite Holstein–Primakoff-like mapping of the collective
// ladder operators, the reduced master equation and the embedding back into
// the full 2^N space. Includes the diagonal (birth–death) fast path.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbcharge/detail/rk45.hpp"
#include "qbcharge/lindblad.hpp"
#include "qbcharge/operators.hpp"
#include "qbcharge/params.hpp"

namespace qbcharge {

// Ladder operators on the (N+1)-dimensional space spanned by |m>,
// m = 0..N excitations (|m> is the Dicke state |N/2, m - N/2>).
struct LadderOps {
  int n_batteries;
  Matrix c;           // sum_m sqrt(m) |m-1><m|
  Matrix pi_s_minus;  // c sqrt(N+1 - c†c):  <m-1|.|m> = sqrt(m (N+1-m))
  Matrix pi_s_plus;   // (sqrt(N+1 - c†c)) c† = pi_s_minus†
};

inline LadderOps hp_ladder(int n) {
  if (n < 1) throw std::invalid_argument("hp_ladder: need at least one battery");
  const Eigen::Index dim = n + 1;
  Matrix c = Matrix::Zero(dim, dim);
  Matrix sm = Matrix::Zero(dim, dim);
  for (int m = 1; m <= n; ++m) {
    c(m - 1, m) = std::sqrt(static_cast<double>(m));
    sm(m - 1, m) = std::sqrt(static_cast<double>(m) * static_cast<double>(n + 1 - m));
  }
  Matrix sp = sm.adjoint();
  return LadderOps{n, std::move(c), std::move(sm), std::move(sp)};
}

inline HilbertSpace reduced_space(int n) { return HilbertSpace({n + 1}); }

// Reduced master equation: H = omega_0 c†c with collective gain/loss through
// the mapped ladder operators.
inline LindbladModel reduced_model(const EffectiveParams& e, int n) {
  e.validate_for_charging();
  if (n < 1) throw std::invalid_argument("reduced_model: need at least one battery");
  const LadderOps lad = hp_ladder(n);
  HilbertSpace space = reduced_space(n);
  Matrix h = Matrix::Zero(n + 1, n + 1);
  for (int m = 0; m <= n; ++m) h(m, m) = static_cast<double>(m);
  std::vector<JumpTerm> jumps;
  jumps.push_back({Operator(space, lad.pi_s_minus), e.gamma_e});
  jumps.push_back({Operator(space, lad.pi_s_plus), e.gamma_e * std::exp(-e.beta_e_omega0)});
  return LindbladModel(Operator(space, std::move(h)), std::move(jumps));
}

namespace detail {
inline double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return v;
}
}  // namespace detail

// Normalized equal-amplitude superposition of all weight-m bitstrings of N
// batteries (bit of site j at position N-1-j of the basis index).
inline Vector dicke_state(int n, int m) {
  if (n < 1 || n > kMaxFullBatteries) throw std::invalid_argument("dicke_state: N out of range");
  if (m < 0 || m > n) throw std::invalid_argument("dicke_state: excitation count out of range");
  const Eigen::Index dim = Eigen::Index(1) << n;
  Vector v = Vector::Zero(dim);
  const double amp = 1.0 / std::sqrt(detail::binomial(n, m));
  for (Eigen::Index idx = 0; idx < dim; ++idx)
    if (std::popcount(static_cast<std::uint64_t>(idx)) == m) v(idx) = amp;
  return v;
}

// Density matrix on the (N+1)-dimensional Dicke-ladder space.
class ReducedState {
 public:
  ReducedState(int n, Matrix m) : n_(n), mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() != n_ + 1)
      throw std::invalid_argument("ReducedState: matrix must be (N+1) x (N+1)");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
      throw std::invalid_argument("ReducedState: not Hermitian");
    if (std::abs(mat_.trace() - Complex(1.0, 0.0)) > kTraceTol)
      throw std::invalid_argument("ReducedState: trace differs from 1");
  }

  static ReducedState from_populations(int n, const Eigen::VectorXd& p) {
    if (p.size() != n + 1) throw std::invalid_argument("ReducedState: need N+1 populations");
    Matrix m = Matrix::Zero(n + 1, n + 1);
    m.diagonal() = p.cast<Complex>();
    return ReducedState(n, std::move(m));
  }

  int n_batteries() const { return n_; }
  const Matrix& mat() const { return mat_; }
  DensityMatrix as_density_matrix() const { return DensityMatrix(Operator(reduced_space(n_), mat_)); }

  double offdiagonal_max() const {
    Matrix d = mat_;
    d.diagonal().setZero();
    return d.cwiseAbs().maxCoeff();
  }

 private:
  int n_;
  Matrix mat_;
};

namespace detail {
// 2^N x (N+1) isometry whose columns are the J = N/2 Dicke states.
inline Matrix dicke_isometry(int n) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  Matrix v(dim, n + 1);
  for (int m = 0; m <= n; ++m) v.col(m) = dicke_state(n, m);
  return v;
}
}  // namespace detail

// sum_{m,m'} rs[m,m'] |D_{N,m}><D_{N,m'}| on the full 2^N space.
inline DensityMatrix embed_reduced(const ReducedState& rs) {
  const int n = rs.n_batteries();
  if (n > kMaxFullBatteries) throw std::invalid_argument("embed_reduced: N exceeds full-space cap");
  const Matrix v = detail::dicke_isometry(n);
  Matrix full = v * rs.mat() * v.adjoint();
  return DensityMatrix(Operator(HilbertSpace(std::vector<int>(static_cast<std::size_t>(n), 2)),
                                std::move(full)));
}

// Projection of a full-space state onto the J = N/2 sector. leakage is the
// weight outside the sector; the block comes back renormalized whenever its
// trace allows it.
struct SymmetricProjection {
  int n_batteries;
  Matrix block;  // (N+1) x (N+1)
  double leakage;

  ReducedState reduced() const { return ReducedState(n_batteries, block); }
};

inline SymmetricProjection project_symmetric(const DensityMatrix& rho) {
  const HilbertSpace& space = rho.space();
  for (int s = 0; s < space.sites(); ++s)
    if (space.dim(s) != 2)
      throw std::invalid_argument("project_symmetric: state is not a register of two-level batteries");
  const int n = space.sites();
  if (n > kMaxFullBatteries) throw std::invalid_argument("project_symmetric: N exceeds full-space cap");
  const Matrix v = detail::dicke_isometry(n);
  Matrix block = v.adjoint() * rho.mat() * v;
  const double weight = block.trace().real();
  const double leakage = 1.0 - weight;
  if (weight > 1e-14) block /= weight;
  return SymmetricProjection{n, std::move(block), leakage};
}

// Populations-only reduced dynamics. For a diagonal initial condition the
// reduced master equation closes on the populations:
//   dp_m/dt = G [A_{m+1} p_{m+1} - A_m p_m] + G e^{-beta} [B_{m-1} p_{m-1} - B_m p_m]
// with A_m = m(N+1-m) and B_m = (m+1)(N-m). Off-diagonal invariance is
// verified against the dense path by the test suite, not assumed here.
inline Trajectory evolve_reduced_diagonal(const EffectiveParams& e, int n, double t_end,
                                          double record_dt, const EvolveOptions& opts = {},
                                          const Eigen::VectorXd* p0 = nullptr) {
  e.validate_for_charging();
  if (n < 1) throw std::invalid_argument("evolve_reduced_diagonal: need at least one battery");
  if (!(t_end > 0.0) || !(record_dt > 0.0))
    throw std::invalid_argument("evolve_reduced_diagonal: need positive t_end and record_dt");

  const double gain = e.gamma_e * std::exp(-e.beta_e_omega0);
  const double loss = e.gamma_e;
  Eigen::VectorXd down(n + 1), up(n + 1);
  for (int m = 0; m <= n; ++m) {
    down(m) = static_cast<double>(m) * static_cast<double>(n + 1 - m);
    up(m) = static_cast<double>(m + 1) * static_cast<double>(n - m);
  }

  Eigen::VectorXd p = Eigen::VectorXd::Zero(n + 1);
  if (p0) {
    if (p0->size() != n + 1) throw std::invalid_argument("evolve_reduced_diagonal: bad p0 size");
    p = *p0;
  } else {
    p(0) = 1.0;
  }

  auto rhs = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd dq(n + 1);
    for (int m = 0; m <= n; ++m) {
      double v = -loss * down(m) * q(m) - gain * up(m) * q(m);
      if (m + 1 <= n) v += loss * down(m + 1) * q(m + 1);
      if (m - 1 >= 0) v += gain * up(m - 1) * q(m - 1);
      dq(m) = v;
    }
    return dq;
  };

  Trajectory traj;
  traj.names = {"energy", "energy_sq", "s_z", "s_minus_s_plus"};
  traj.values.resize(4);
  const auto n_records = static_cast<std::size_t>(std::floor(t_end / record_dt + 1e-9)) + 1;
  std::vector<double> record_times(n_records);
  for (std::size_t k = 0; k < n_records; ++k) record_times[k] = static_cast<double>(k) * record_dt;

  auto on_record = [&](double t, const Eigen::VectorXd& q) {
    const double drift = std::abs(q.sum() - 1.0);
    traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
    if (drift > 1e-6)
      throw std::runtime_error("evolve_reduced_diagonal: trace drift at t = " + std::to_string(t));
    double energy = 0.0, energy_sq = 0.0, smsp = 0.0;
    for (int m = 0; m <= n; ++m) {
      const double mm = static_cast<double>(m);
      energy += mm * q(m);
      energy_sq += mm * mm * q(m);
      smsp += static_cast<double>((n - m)) * (mm + 1.0) * q(m);
    }
    traj.times.push_back(t);
    traj.values[0].push_back(energy);
    traj.values[1].push_back(energy_sq);
    traj.values[2].push_back(energy - 0.5 * static_cast<double>(n));
    traj.values[3].push_back(smsp);
  };

  detail::Rk45Options rk{opts.rel_tol, opts.abs_tol};
  detail::integrate_dopri5(rhs, p, 0.0, t_end, record_times, on_record, rk);
  return traj;
}

}  // namespace qbcharge
