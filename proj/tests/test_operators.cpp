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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "qbcharge/operators.hpp"
#include "qbcharge/symmetric.hpp"

using namespace qbcharge;

namespace {
Operator qubit_op(const Matrix& m) { return Operator(HilbertSpace({2}), m); }
}  // namespace

TEST_CASE("kron basics") {
  const Operator i2 = identity(HilbertSpace({2}));
  const Operator i4 = kron(i2, i2);
  REQUIRE(i4.mat.isApprox(Matrix::Identity(4, 4)));
  REQUIRE(i4.space.dims() == std::vector<int>{2, 2});

  // kron(sigma+, I) maps |00> -> |10>.
  const Operator op = kron(qubit_op(sigma_plus()), i2);
  Vector ket00 = Vector::Zero(4);
  ket00(0) = 1.0;
  Vector mapped = op.mat * ket00;
  REQUIRE(std::abs(mapped(2) - Complex(1.0, 0.0)) < 1e-15);
  REQUIRE(mapped.norm() == Catch::Approx(1.0));

  const Operator n1 = qubit_op(ket_bra(2, 1, 1));
  const Operator nn = kron(n1, n1);
  REQUIRE(nn.mat.diagonal().real().isApprox(Eigen::Vector4d(0, 0, 0, 1)));
}

TEST_CASE("kron is associative") {
  std::mt19937 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const Operator a(HilbertSpace({2}), oracles::random_matrix(2, rng));
    const Operator b(HilbertSpace({3}), oracles::random_matrix(3, rng));
    const Operator c(HilbertSpace({2}), oracles::random_matrix(2, rng));
    const Matrix lhs = kron(kron(a, b), c).mat;
    const Matrix rhs = kron(a, kron(b, c)).mat;
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);  // exact equality
  }
}

TEST_CASE("embed places the operator on the right site") {
  const HilbertSpace two_qubits({2, 2});
  REQUIRE(embed(qubit_op(sigma_plus()), 0, two_qubits)
              .mat.isApprox(kron(qubit_op(sigma_plus()), identity(HilbertSpace({2}))).mat));
  REQUIRE(embed(identity(HilbertSpace({2})), 1, two_qubits).mat.isApprox(Matrix::Identity(4, 4)));

  // embed(|1><0|, 1, [3,2]) maps |2>_E |0>_B -> |2>_E |1>_B.
  const HilbertSpace engine_battery({3, 2});
  const Operator raise = embed(qubit_op(ket_bra(2, 1, 0)), 1, engine_battery);
  Vector ket = Vector::Zero(6);
  ket(4) = 1.0;  // |2,0>
  Vector out = raise.mat * ket;
  REQUIRE(std::abs(out(5) - Complex(1.0, 0.0)) < 1e-15);  // |2,1>

  REQUIRE_THROWS_AS(embed(qubit_op(sigma_plus()), 2, two_qubits), std::invalid_argument);
  REQUIRE_THROWS_AS(embed(qubit_op(sigma_plus()), 0, engine_battery), std::invalid_argument);
}

TEST_CASE("collective spin operators") {
  SECTION("N = 1 S_z eigenvalues") {
    const CollectiveSpinOps ops = collective_spin_ops(1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(ops.s_z.mat);
    REQUIRE(es.eigenvalues()(0) == Catch::Approx(-0.5));
    REQUIRE(es.eigenvalues()(1) == Catch::Approx(0.5));
  }
  SECTION("N = 2 singlet/triplet spectrum of S^2") {
    const CollectiveSpinOps ops = collective_spin_ops(2);
    Eigen::SelfAdjointEigenSolver<Matrix> es(ops.s_sq.mat);
    Eigen::Vector4d expected(0, 2, 2, 2);
    REQUIRE(es.eigenvalues().isApprox(expected, 1e-12));
  }
  SECTION("N = 3 all-down state has J = N/2") {
    const CollectiveSpinOps ops = collective_spin_ops(3);
    Vector down = Vector::Zero(8);
    down(0) = 1.0;
    REQUIRE((ops.s_sq.mat * down - 3.75 * down).norm() < 1e-12);
  }
  SECTION("adjoint pairing and conservation") {
    for (int n : {1, 2, 3, 4}) {
      const CollectiveSpinOps ops = collective_spin_ops(n);
      REQUIRE((ops.s_plus.mat.adjoint() - ops.s_minus.mat).cwiseAbs().maxCoeff() == 0.0);
      REQUIRE(commutator(ops.s_sq, ops.s_plus).mat.cwiseAbs().maxCoeff() < 1e-12);
      REQUIRE(commutator(ops.s_sq, ops.s_minus).mat.cwiseAbs().maxCoeff() < 1e-12);
      // H_B = omega_0 (S^Z + N/2) commutes with S^2 iff S^Z does.
      REQUIRE(commutator(ops.s_sq, ops.s_z).mat.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  REQUIRE_THROWS_AS(collective_spin_ops(0), std::invalid_argument);
  REQUIRE_THROWS_AS(collective_spin_ops(13), std::invalid_argument);
}

TEST_CASE("expectation values") {
  const HilbertSpace space({2, 2});
  const DensityMatrix rho = basis_state(space, {0, 0});
  REQUIRE(expectation(identity(space), rho) == Catch::Approx(1.0));

  // Battery Hamiltonian on the empty state and on a single excitation.
  Matrix h = Matrix::Zero(4, 4);
  h(1, 1) = 1.0;
  h(2, 2) = 1.0;
  h(3, 3) = 2.0;
  const Operator h_b(space, h);
  REQUIRE(expectation(h_b, rho) == Catch::Approx(0.0));
  const DensityMatrix dicke = pure_state(space, dicke_state(2, 1));
  REQUIRE(expectation(h_b, dicke) == Catch::Approx(1.0));

  // Hermitian observable on a random valid state has negligible imaginary part.
  std::mt19937 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Operator obs(space, oracles::random_hermitian(4, rng));
    const DensityMatrix state(Operator(space, oracles::random_density(4, rng)));
    REQUIRE_NOTHROW(expectation(obs, state));
  }

  const Operator not_hermitian(space, oracles::random_matrix(4, rng));
  REQUIRE_THROWS_AS(expectation(not_hermitian, rho), std::invalid_argument);
  REQUIRE_THROWS_AS(expectation(identity(HilbertSpace({2})), rho), std::invalid_argument);
}

TEST_CASE("density matrix invariants enforced") {
  const HilbertSpace space({2});
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = 0.7;
  bad(1, 1) = 0.7;
  REQUIRE_THROWS_AS(DensityMatrix(Operator(space, bad)), std::invalid_argument);

  Matrix not_psd = Matrix::Zero(2, 2);
  not_psd(0, 0) = 1.5;
  not_psd(1, 1) = -0.5;
  REQUIRE_THROWS_AS(DensityMatrix(Operator(space, not_psd)), std::invalid_argument);

  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 0) = 0.5;
  skew(1, 1) = 0.5;
  skew(0, 1) = Complex(0.0, 1e-3);
  REQUIRE_THROWS_AS(DensityMatrix(Operator(space, skew)), std::invalid_argument);
}

TEST_CASE("partial trace") {
  std::mt19937 rng(23);
  const HilbertSpace space({3, 2});
  const Matrix rho_e = oracles::random_density(3, rng);
  const Matrix rho_b = oracles::random_density(2, rng);
  const Operator joint = kron(Operator(HilbertSpace({3}), rho_e), Operator(HilbertSpace({2}), rho_b));
  REQUIRE(partial_trace(joint, {0}).mat.isApprox(rho_e, 1e-13));
  REQUIRE(partial_trace(joint, {1}).mat.isApprox(rho_b, 1e-13));

  // Tracing out everything but one site preserves the trace.
  const Operator mixed(space, oracles::random_density(6, rng));
  REQUIRE(partial_trace(mixed, {1}).mat.trace().real() == Catch::Approx(1.0));
}

TEST_CASE("trace distance") {
  const HilbertSpace space({2});
  const DensityMatrix a = basis_state(space, {0});
  const DensityMatrix b = basis_state(space, {1});
  REQUIRE(trace_distance(a, b) == Catch::Approx(1.0));
  REQUIRE(trace_distance(a, a) == Catch::Approx(0.0).margin(1e-15));
}
