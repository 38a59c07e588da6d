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

// operators.hpp — Dense complex operator algebra over composite Hilbert spaces.
//
// Conventions used throughout the library:
//   * energies are dimensionless in units of omega_0, times in units of
//     1/omega_0 (hbar = k_B = 1),
//   * composite bases are ordered engine factors first, then batteries,
//     each factor in computational order |0>, |1> (, |2>),
//   * site 0 is the most significant factor: kron(A, B) places A on the
//     leading index.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace qbcharge {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

// Full-space objects are capped at 12 batteries (4096-dim); the reduced
// model covers everything larger.
inline constexpr int kMaxFullBatteries = 12;

// Ordered list of subsystem dimensions, e.g. {3, 2, 2} = one engine and
// two batteries.
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("HilbertSpace: no subsystems");
    total_ = 1;
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("HilbertSpace: subsystem dimension must be >= 2");
      total_ *= d;
    }
  }

  const std::vector<int>& dims() const { return dims_; }
  int sites() const { return static_cast<int>(dims_.size()); }
  int dim(int site) const { return dims_.at(static_cast<std::size_t>(site)); }
  Eigen::Index total_dim() const { return total_; }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
    return a.dims_ == b.dims_;
  }
  friend bool operator!=(const HilbertSpace& a, const HilbertSpace& b) { return !(a == b); }

 private:
  std::vector<int> dims_;
  Eigen::Index total_ = 0;
};

// Dense operator on a labeled Hilbert space.
struct Operator {
  HilbertSpace space;
  Matrix mat;

  Operator(HilbertSpace s, Matrix m) : space(std::move(s)), mat(std::move(m)) {
    if (mat.rows() != mat.cols() || mat.rows() != space.total_dim())
      throw std::invalid_argument("Operator: matrix shape does not match space");
  }

  Operator adjoint() const { return Operator(space, mat.adjoint()); }

  double hermiticity_defect() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }
  bool is_hermitian(double tol = kHermitianTol) const { return hermiticity_defect() <= tol; }
};

namespace detail {
inline void require_same_space(const Operator& a, const Operator& b, const char* what) {
  if (a.space != b.space) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace detail

inline Operator operator+(const Operator& a, const Operator& b) {
  detail::require_same_space(a, b, "operator+");
  return Operator(a.space, a.mat + b.mat);
}

inline Operator operator-(const Operator& a, const Operator& b) {
  detail::require_same_space(a, b, "operator-");
  return Operator(a.space, a.mat - b.mat);
}

inline Operator operator*(const Operator& a, const Operator& b) {
  detail::require_same_space(a, b, "operator*");
  return Operator(a.space, a.mat * b.mat);
}

inline Operator operator*(Complex c, const Operator& a) { return Operator(a.space, c * a.mat); }
inline Operator operator*(double c, const Operator& a) { return Operator(a.space, c * a.mat); }

inline Operator commutator(const Operator& a, const Operator& b) {
  detail::require_same_space(a, b, "commutator");
  return Operator(a.space, a.mat * b.mat - b.mat * a.mat);
}

// |i><j| on a single d-dimensional factor.
inline Matrix ket_bra(int dim, int i, int j) {
  if (i < 0 || j < 0 || i >= dim || j >= dim) throw std::invalid_argument("ket_bra: index out of range");
  Matrix m = Matrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

inline Matrix sigma_plus() { return ket_bra(2, 1, 0); }
inline Matrix sigma_minus() { return ket_bra(2, 0, 1); }
inline Matrix number_op(int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) m(k, k) = static_cast<double>(k);
  return m;
}

inline Operator identity(const HilbertSpace& space) {
  return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()));
}

// Tensor product; the left factor takes the leading index.
inline Operator kron(const Operator& a, const Operator& b) {
  const Eigen::Index na = a.space.total_dim();
  const Eigen::Index nb = b.space.total_dim();
  Matrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < na; ++j)
      out.block(i * nb, j * nb, nb, nb) = a.mat(i, j) * b.mat;
  std::vector<int> dims = a.space.dims();
  dims.insert(dims.end(), b.space.dims().begin(), b.space.dims().end());
  return Operator(HilbertSpace(std::move(dims)), std::move(out));
}

// local acting on `site`, identity on every other factor.
inline Operator embed(const Operator& local, int site, const HilbertSpace& space) {
  if (site < 0 || site >= space.sites()) throw std::invalid_argument("embed: site out of range");
  if (local.space.total_dim() != space.dim(site))
    throw std::invalid_argument("embed: local dimension does not match site");
  const int d = space.dim(site);
  Eigen::Index lead = 1, trail = 1;
  for (int k = 0; k < site; ++k) lead *= space.dim(k);
  for (int k = site + 1; k < space.sites(); ++k) trail *= space.dim(k);
  Matrix out = Matrix::Zero(space.total_dim(), space.total_dim());
  for (Eigen::Index a = 0; a < lead; ++a)
    for (int s = 0; s < d; ++s)
      for (int sp = 0; sp < d; ++sp) {
        const Complex v = local.mat(s, sp);
        if (v == Complex(0.0, 0.0)) continue;
        const Eigen::Index row0 = (a * d + s) * trail;
        const Eigen::Index col0 = (a * d + sp) * trail;
        for (Eigen::Index b = 0; b < trail; ++b) out(row0 + b, col0 + b) = v;
      }
  return Operator(space, std::move(out));
}

// Hermitian, unit-trace state. Hermiticity and trace are enforced on
// construction; the PSD check (min eigenvalue >= -1e-9) runs automatically
// up to dimension 256 and on demand above that.
class DensityMatrix {
 public:
  explicit DensityMatrix(Operator op) : op_(std::move(op)) {
    const double herm = op_.hermiticity_defect();
    if (herm > kHermitianTol)
      throw std::invalid_argument("DensityMatrix: not Hermitian (defect " + std::to_string(herm) + ")");
    const Complex tr = op_.mat.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol)
      throw std::invalid_argument("DensityMatrix: trace differs from 1");
    if (op_.mat.rows() <= kAutoPsdMaxDim && min_eigenvalue() < -kPsdTol)
      throw std::invalid_argument("DensityMatrix: not positive semidefinite");
  }

  const Operator& op() const { return op_; }
  const Matrix& mat() const { return op_.mat; }
  const HilbertSpace& space() const { return op_.space; }
  Eigen::Index dim() const { return op_.mat.rows(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(op_.mat, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  static constexpr Eigen::Index kAutoPsdMaxDim = 256;

 private:
  Operator op_;
};

inline DensityMatrix pure_state(const HilbertSpace& space, const Vector& ket) {
  if (ket.size() != space.total_dim()) throw std::invalid_argument("pure_state: ket dimension mismatch");
  Vector psi = ket / ket.norm();
  return DensityMatrix(Operator(space, psi * psi.adjoint()));
}

// |l_0 l_1 ...> with one level index per site.
inline DensityMatrix basis_state(const HilbertSpace& space, const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != space.sites())
    throw std::invalid_argument("basis_state: one level per site required");
  Eigen::Index idx = 0;
  for (int s = 0; s < space.sites(); ++s) {
    if (levels[static_cast<std::size_t>(s)] < 0 || levels[static_cast<std::size_t>(s)] >= space.dim(s))
      throw std::invalid_argument("basis_state: level out of range");
    idx = idx * space.dim(s) + levels[static_cast<std::size_t>(s)];
  }
  Vector ket = Vector::Zero(space.total_dim());
  ket(idx) = 1.0;
  return pure_state(space, ket);
}

namespace detail {
// tr(a * b) without forming the product.
inline Complex trace_of_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().array() * b.array()).sum();
}
}  // namespace detail

// tr(obs * rho) for Hermitian obs; the imaginary residue must stay below
// 1e-10 and is discarded after the assertion.
inline double expectation(const Operator& obs, const DensityMatrix& rho) {
  if (obs.space != rho.space()) throw std::invalid_argument("expectation: dimension mismatch");
  if (!obs.is_hermitian()) throw std::invalid_argument("expectation: observable is not Hermitian");
  const Complex v = detail::trace_of_product(obs.mat, rho.mat());
  if (std::abs(v.imag()) >= 1e-10)
    throw std::runtime_error("expectation: imaginary residue " + std::to_string(v.imag()));
  return v.real();
}

struct CollectiveSpinOps {
  Operator s_plus;
  Operator s_minus;
  Operator s_z;
  Operator s_sq;
};

// S^+ = sum_j sigma^+_j, S^Z = sum_j (sigma^+ sigma^- - 1/2)_j and
// S^2 = (S^+ S^- + S^- S^+)/2 + (S^Z)^2 on N two-level batteries.
inline CollectiveSpinOps collective_spin_ops(int n_batteries) {
  if (n_batteries < 1 || n_batteries > kMaxFullBatteries)
    throw std::invalid_argument("collective_spin_ops: battery count out of range");
  HilbertSpace space(std::vector<int>(static_cast<std::size_t>(n_batteries), 2));
  const Eigen::Index n = space.total_dim();
  Matrix sp = Matrix::Zero(n, n);
  Matrix sz = Matrix::Zero(n, n);
  const Operator sigma_p_op(HilbertSpace({2}), sigma_plus());
  Matrix local_z = Matrix::Zero(2, 2);
  local_z(0, 0) = -0.5;
  local_z(1, 1) = 0.5;
  const Operator local_z_op(HilbertSpace({2}), local_z);
  for (int j = 0; j < n_batteries; ++j) {
    sp += embed(sigma_p_op, j, space).mat;
    sz += embed(local_z_op, j, space).mat;
  }
  Matrix sm = sp.adjoint();
  // S^+ S^- via sparse products: the collective ladders have only N*2^(N-1)
  // nonzero entries.
  SparseMatrix sps = sp.sparseView();
  SparseMatrix sms = sm.sparseView();
  Matrix ssq = 0.5 * (Matrix(sps * sms) + Matrix(sms * sps));
  ssq.diagonal() += sz.diagonal().array().square().matrix();
  return CollectiveSpinOps{Operator(space, std::move(sp)), Operator(space, std::move(sm)),
                           Operator(space, std::move(sz)), Operator(space, std::move(ssq))};
}

// Partial trace keeping the listed sites (ascending order).
inline Operator partial_trace(const Operator& op, const std::vector<int>& keep_sites) {
  const HilbertSpace& space = op.space;
  std::vector<bool> keep(static_cast<std::size_t>(space.sites()), false);
  for (int s : keep_sites) {
    if (s < 0 || s >= space.sites()) throw std::invalid_argument("partial_trace: site out of range");
    keep[static_cast<std::size_t>(s)] = true;
  }
  std::vector<int> kept_dims;
  for (int s = 0; s < space.sites(); ++s)
    if (keep[static_cast<std::size_t>(s)]) kept_dims.push_back(space.dim(s));
  if (kept_dims.empty()) throw std::invalid_argument("partial_trace: must keep at least one site");

  // Strides of each site index within the composite index.
  std::vector<Eigen::Index> stride(static_cast<std::size_t>(space.sites()), 1);
  for (int s = space.sites() - 2; s >= 0; --s)
    stride[static_cast<std::size_t>(s)] = stride[static_cast<std::size_t>(s + 1)] * space.dim(s + 1);

  HilbertSpace out_space(kept_dims);
  const Eigen::Index nk = out_space.total_dim();
  Matrix out = Matrix::Zero(nk, nk);
  const Eigen::Index n = space.total_dim();
  std::vector<int> digits(static_cast<std::size_t>(space.sites()));
  for (Eigen::Index row = 0; row < n; ++row) {
    Eigen::Index r = row;
    for (int s = 0; s < space.sites(); ++s) {
      digits[static_cast<std::size_t>(s)] = static_cast<int>(r / stride[static_cast<std::size_t>(s)]);
      r %= stride[static_cast<std::size_t>(s)];
    }
    Eigen::Index row_keep = 0, row_tr = 0;
    for (int s = 0; s < space.sites(); ++s) {
      if (keep[static_cast<std::size_t>(s)])
        row_keep = row_keep * space.dim(s) + digits[static_cast<std::size_t>(s)];
      else
        row_tr = row_tr * space.dim(s) + digits[static_cast<std::size_t>(s)];
    }
    for (Eigen::Index col = 0; col < n; ++col) {
      Eigen::Index c = col;
      Eigen::Index col_keep = 0, col_tr = 0;
      for (int s = 0; s < space.sites(); ++s) {
        const int dg = static_cast<int>(c / stride[static_cast<std::size_t>(s)]);
        c %= stride[static_cast<std::size_t>(s)];
        if (keep[static_cast<std::size_t>(s)])
          col_keep = col_keep * space.dim(s) + dg;
        else
          col_tr = col_tr * space.dim(s) + dg;
      }
      if (row_tr == col_tr) out(row_keep, col_keep) += op.mat(row, col);
    }
  }
  return Operator(std::move(out_space), std::move(out));
}

// Trace distance (1/2)||a - b||_1 of two Hermitian matrices.
inline double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.mat(), b.mat());
}

}  // namespace qbcharge
