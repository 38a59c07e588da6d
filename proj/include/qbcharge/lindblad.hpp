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

// lindblad.hpp — LGKS generators, adaptive time evolution and the dense
// null-space steady-state solver.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "qbcharge/detail/rk45.hpp"
#include "qbcharge/operators.hpp"

namespace qbcharge {

struct JumpTerm {
  Operator op;
  double rate;  // nonnegative, units of omega_0
};

// A Hamiltonian plus (jump operator, rate) pairs. The generator action is
// applied through sparse mirrors of the operators; the jumps occurring in
// this model (ladder and collective-spin operators) have O(N) to
// O(N 2^N) nonzeros, which makes the right-hand side O(dim^2) instead of
// O(dim^3).
class LindbladModel {
 public:
  LindbladModel(Operator hamiltonian, std::vector<JumpTerm> jumps)
      : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
    for (const JumpTerm& j : jumps_) {
      if (j.op.space != hamiltonian_.space)
        throw std::invalid_argument("LindbladModel: jump operator on a different space");
      if (!(j.rate >= 0.0)) throw std::invalid_argument("LindbladModel: negative jump rate");
    }
    h_sparse_ = hamiltonian_.mat.sparseView();
    for (const JumpTerm& j : jumps_) {
      JumpData d;
      d.a = j.op.mat.sparseView();
      SparseMatrix a_dag = SparseMatrix(d.a.adjoint());
      d.a_dag = a_dag;
      d.a_dag_a = SparseMatrix(a_dag * d.a);
      d.rate = j.rate;
      jump_data_.push_back(std::move(d));
    }
  }

  const Operator& hamiltonian() const { return hamiltonian_; }
  const std::vector<JumpTerm>& jumps() const { return jumps_; }
  const HilbertSpace& space() const { return hamiltonian_.space; }
  Eigen::Index dim() const { return hamiltonian_.mat.rows(); }

  // -i[H, rho] + sum_k rate_k D[a_k](rho)
  Matrix apply(const Matrix& rho) const {
    const Complex mi(0.0, -1.0);
    Matrix out = mi * (h_sparse_ * rho - rho * h_sparse_);
    for (const JumpData& d : jump_data_) {
      if (d.rate == 0.0) continue;
      Matrix a_rho = d.a * rho;
      out.noalias() += d.rate * (a_rho * Matrix(d.a_dag));
      out.noalias() -= (0.5 * d.rate) * (d.a_dag_a * rho);
      out.noalias() -= (0.5 * d.rate) * (rho * d.a_dag_a);
    }
    return out;
  }

 private:
  struct JumpData {
    SparseMatrix a, a_dag, a_dag_a;
    double rate;
  };

  Operator hamiltonian_;
  std::vector<JumpTerm> jumps_;
  SparseMatrix h_sparse_;
  std::vector<JumpData> jump_data_;
};

// D[a](rho) = a rho a† - (a†a rho + rho a†a)/2. The result is traceless.
inline Operator dissipator_apply(const Operator& a, const Operator& rho) {
  detail::require_same_space(a, rho, "dissipator_apply");
  const Matrix a_dag = a.mat.adjoint();
  const Matrix a_dag_a = a_dag * a.mat;
  return Operator(a.space,
                  a.mat * rho.mat * a_dag - 0.5 * (a_dag_a * rho.mat + rho.mat * a_dag_a));
}

inline Operator liouvillian_apply(const LindbladModel& model, const Operator& rho) {
  if (rho.space != model.space()) throw std::invalid_argument("liouvillian_apply: dimension mismatch");
  return Operator(rho.space, model.apply(rho.mat));
}

// Time grid plus named observable expectations; snapshots are raw density
// matrices recorded at the same grid when requested.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // values[i][k] = <names[i]>(times[k])
  std::vector<Matrix> snapshots;
  double max_trace_drift = 0.0;
  double max_imag_residue = 0.0;

  const std::vector<double>& observable(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return values[i];
    throw std::out_of_range("Trajectory: no observable named " + name);
  }
};

struct EvolveOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  bool record_snapshots = false;
};

using NamedOperator = std::pair<std::string, Operator>;

// Integrates the master equation with the embedded RK 4(5) scheme and
// records observables at multiples of record_dt through dense output.
// Aborts if the trace drifts beyond 1e-6.
inline Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, double t_end,
                         const std::vector<NamedOperator>& observables, double record_dt,
                         const EvolveOptions& opts = {}) {
  if (rho0.space() != model.space()) throw std::invalid_argument("evolve: state/model space mismatch");
  if (!(t_end > 0.0)) throw std::invalid_argument("evolve: t_end must be positive");
  if (!(record_dt > 0.0)) throw std::invalid_argument("evolve: record_dt must be positive");
  for (const NamedOperator& obs : observables)
    if (obs.second.space != model.space())
      throw std::invalid_argument("evolve: observable space mismatch");

  Trajectory traj;
  for (const NamedOperator& obs : observables) traj.names.push_back(obs.first);
  traj.values.resize(observables.size());

  const auto n_records = static_cast<std::size_t>(std::floor(t_end / record_dt + 1e-9)) + 1;
  std::vector<double> record_times(n_records);
  for (std::size_t k = 0; k < n_records; ++k) record_times[k] = static_cast<double>(k) * record_dt;

  auto on_record = [&](double t, const Matrix& rho) {
    const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
    traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
    if (drift > 1e-6)
      throw std::runtime_error("evolve: trace drift " + std::to_string(drift) + " at t = " +
                               std::to_string(t));
    traj.times.push_back(t);
    for (std::size_t i = 0; i < observables.size(); ++i) {
      const Complex v = detail::trace_of_product(observables[i].second.mat, rho);
      traj.max_imag_residue = std::max(traj.max_imag_residue, std::abs(v.imag()));
      traj.values[i].push_back(v.real());
    }
    if (opts.record_snapshots) traj.snapshots.push_back(rho);
  };

  detail::Rk45Options rk{opts.rel_tol, opts.abs_tol};
  detail::integrate_dopri5([&](const Matrix& rho) { return model.apply(rho); }, rho0.mat(), 0.0,
                           t_end, record_times, on_record, rk);
  return traj;
}

namespace detail {
// Standard Kronecker product of plain matrices; the left factor addresses
// the column digit of the column-major vectorization.
inline Matrix matrix_kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}
}  // namespace detail

// Dense vectorized-Liouvillian null space via singular value decomposition.
// Restricted to dim <= 64; the smallest singular value must be isolated
// (gap ratio > 1e3), otherwise the null space is reported as degenerate.
inline DensityMatrix steady_state_numeric(const LindbladModel& model) {
  const Eigen::Index n = model.dim();
  if (n > 64) throw std::invalid_argument("steady_state_numeric: dimension cap 64 exceeded");

  const Matrix eye = Matrix::Identity(n, n);
  const Matrix& h = model.hamiltonian().mat;
  const Complex mi(0.0, -1.0);
  // vec(A X B) = (B^T kron A) vec(X) with column-major stacking.
  Matrix lv = mi * (detail::matrix_kron(eye, h) - detail::matrix_kron(h.transpose(), eye));
  for (const JumpTerm& j : model.jumps()) {
    const Matrix& a = j.op.mat;
    const Matrix a_dag_a = a.adjoint() * a;
    lv += j.rate * (detail::matrix_kron(a.conjugate(), a) -
                    0.5 * detail::matrix_kron(eye, a_dag_a) -
                    0.5 * detail::matrix_kron(a_dag_a.transpose(), eye));
  }

  Eigen::BDCSVD<Matrix> svd(lv, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::Index m = sv.size();
  const double s_max = sv(0);
  Eigen::Index null_count = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (sv(i) <= s_max * 1e-10) ++null_count;
  if (null_count != 1)
    throw std::runtime_error("steady_state_numeric: degenerate null space (dimension " +
                             std::to_string(null_count) + ")");
  const double gap = sv(m - 2) / std::max(sv(m - 1), 1e-300);
  if (gap <= 1e3)
    throw std::runtime_error("steady_state_numeric: null space not isolated (gap ratio " +
                             std::to_string(gap) + ")");

  const Vector v = svd.matrixV().col(m - 1);
  Matrix rho = Eigen::Map<const Matrix>(v.data(), n, n);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12)
    throw std::runtime_error("steady_state_numeric: null vector has vanishing trace");
  rho /= tr;

  const double residual = model.apply(rho).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw std::runtime_error("steady_state_numeric: fixed-point residual " +
                             std::to_string(residual));
  return DensityMatrix(Operator(model.space(), std::move(rho)));
}

}  // namespace qbcharge
