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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qbcharge/engine.hpp"
#include "qbcharge/lindblad.hpp"
#include "qbcharge/operators.hpp"
#include "qbcharge/symmetric.hpp"

using namespace qbcharge;

namespace {

const double kExp08 = std::exp(0.8);               // 2.225540928492468
const double kGibbs = kExp08 / (1.0 + kExp08);     // 0.689974481127612...

// Single two-level battery under the effective gain/loss pair.
LindbladModel single_tls_model(double beta = -0.8, double gamma = 0.1) {
  HilbertSpace space({2});
  std::vector<JumpTerm> jumps;
  jumps.push_back({Operator(space, sigma_minus()), gamma});
  jumps.push_back({Operator(space, sigma_plus()), gamma * std::exp(-beta)});
  Matrix h = ket_bra(2, 1, 1);
  return LindbladModel(Operator(space, h), std::move(jumps));
}

EngineParams reference_engine() {
  return EngineParams::from_products(0.2, 1.0, 2.0, 1.0, 1.0, 0.01);
}

}  // namespace

TEST_CASE("dissipator action") {
  HilbertSpace space({2});
  SECTION("zero jump gives zero") {
    std::mt19937 rng(3);
    const Operator zero(space, Matrix::Zero(2, 2));
    const Operator rho(space, oracles::random_density(2, rng));
    REQUIRE(dissipator_apply(zero, rho).mat.cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("decay of the excited state") {
    const Operator sm(space, sigma_minus());
    const Operator excited(space, ket_bra(2, 1, 1));
    Matrix expected = ket_bra(2, 0, 0) - ket_bra(2, 1, 1);
    REQUIRE((dissipator_apply(sm, excited).mat - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("ground state is dark") {
    const Operator sm(space, sigma_minus());
    const Operator ground(space, ket_bra(2, 0, 0));
    REQUIRE(dissipator_apply(sm, ground).mat.cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("tracelessness on random input") {
    std::mt19937 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
      const Operator a(space, oracles::random_matrix(2, rng));
      const Operator rho(space, oracles::random_density(2, rng));
      REQUIRE(std::abs(dissipator_apply(a, rho).mat.trace()) < 1e-12);
    }
  }
}

TEST_CASE("liouvillian action") {
  SECTION("trivial model") {
    HilbertSpace space({2});
    const LindbladModel model(Operator(space, Matrix::Zero(2, 2)), {});
    std::mt19937 rng(9);
    const Matrix rho = oracles::random_density(2, rng);
    REQUIRE(model.apply(rho).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("engine steady state is a fixed point") {
    const EngineParams p = reference_engine();
    const LindbladModel model = engine_model(p);
    REQUIRE(model.apply(engine_steady_state(p).mat()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("pumping rate of the empty two-level battery") {
    // d<n>/dt on |0><0| equals the bare absorption rate Gamma e^{-beta}.
    const double gamma = 0.1, beta = -0.8;
    const LindbladModel model = single_tls_model(beta, gamma);
    const Matrix rho = ket_bra(2, 0, 0);
    const Matrix deriv = model.apply(rho);
    const double rate = (ket_bra(2, 1, 1).transpose().array() * deriv.array()).sum().real();
    REQUIRE(rate == Catch::Approx(gamma * std::exp(-beta)).epsilon(1e-14));
  }
  SECTION("matches the naive dense evaluation on random models") {
    std::mt19937 rng(17);
    for (int rep = 0; rep < 8; ++rep) {
      const int dim = 2 + static_cast<int>(rng() % 5);
      HilbertSpace space({dim});
      const Matrix h = oracles::random_hermitian(dim, rng);
      std::vector<std::pair<Matrix, double>> jump_mats;
      std::vector<JumpTerm> jumps;
      for (int j = 0; j < 3; ++j) {
        const Matrix a = oracles::random_matrix(dim, rng);
        const double rate = 0.1 + 0.4 * static_cast<double>(j);
        jump_mats.emplace_back(a, rate);
        jumps.push_back({Operator(space, a), rate});
      }
      const LindbladModel model(Operator(space, h), jumps);
      const Matrix rho = oracles::random_density(dim, rng);
      const Matrix expected = oracles::naive_lindblad_rhs(h, jump_mats, rho);
      REQUIRE((model.apply(rho) - expected).cwiseAbs().maxCoeff() < 1e-12);
      REQUIRE(std::abs(model.apply(rho).trace()) < 1e-12);
    }
  }
  SECTION("construction rejects bad input") {
    HilbertSpace space({2});
    std::vector<JumpTerm> bad = {{Operator(space, sigma_minus()), -0.1}};
    REQUIRE_THROWS_AS(LindbladModel(Operator(space, Matrix::Zero(2, 2)), bad),
                      std::invalid_argument);
    std::vector<JumpTerm> mismatched = {{Operator(HilbertSpace({3}), Matrix::Zero(3, 3)), 0.1}};
    REQUIRE_THROWS_AS(LindbladModel(Operator(space, Matrix::Zero(2, 2)), mismatched),
                      std::invalid_argument);
  }
}

TEST_CASE("evolve: Hamiltonian-only eigenstate stays stationary") {
  HilbertSpace space({3});
  Matrix h = Matrix::Zero(3, 3);
  h(1, 1) = 1.0;
  h(2, 2) = 2.0;
  const LindbladModel model(Operator(space, h), {});
  std::vector<NamedOperator> obs;
  obs.emplace_back("energy", Operator(space, h));
  obs.emplace_back("coherence", Operator(space, Matrix(ket_bra(3, 0, 1) + ket_bra(3, 1, 0))));
  const Trajectory traj = evolve(model, basis_state(space, {1}), 20.0, obs, 0.5);
  for (double v : traj.observable("energy")) REQUIRE(std::abs(v - 1.0) < 1e-9);
  for (double v : traj.observable("coherence")) REQUIRE(std::abs(v) < 1e-9);
}

TEST_CASE("evolve: two-level relaxation against the analytic solution") {
  const double gamma = 0.1, beta = -0.8;
  const LindbladModel model = single_tls_model(beta, gamma);
  const HilbertSpace space({2});
  std::vector<NamedOperator> obs;
  obs.emplace_back("n", Operator(space, ket_bra(2, 1, 1)));
  const Trajectory traj = evolve(model, basis_state(space, {0}), 80.0, obs, 0.4);

  const double rate = gamma * (1.0 + std::exp(-beta));
  const std::vector<double>& n = traj.observable("n");
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double expected = kGibbs * (1.0 - std::exp(-rate * traj.times[k]));
    REQUIRE(std::abs(n[k] - expected) < 1e-8);  // includes dense-output points
  }
  REQUIRE(n.back() == Catch::Approx(kGibbs).margin(1e-9));
  REQUIRE(traj.max_trace_drift < 1e-8);
}

TEST_CASE("evolve: N = 10 collective charging plateau") {
  // Reduced representation of the collective effective model;
  // <H_B> converges to the closed-form capacity 9.18569... (units omega_0).
  EffectiveParams e{-0.8, 0.1, true};
  const LindbladModel model = reduced_model(e, 10);
  const HilbertSpace space = reduced_space(10);
  std::vector<NamedOperator> obs;
  obs.emplace_back("energy", Operator(space, model.hamiltonian().mat));
  const Trajectory traj = evolve(model, basis_state(space, {0}), 60.0, obs, 1.0);
  REQUIRE(traj.observable("energy").back() == Catch::Approx(9.18569209293).margin(2e-7));
}

TEST_CASE("evolve: state-quality invariants along a dissipative trajectory") {
  EffectiveParams e{-0.8, 0.1, true};
  const LindbladModel model = effective_battery_model(e, 3, /*full_space=*/true);
  EvolveOptions opts;
  opts.record_snapshots = true;
  const Trajectory traj = evolve(model, basis_state(model.space(), {0, 0, 0}), 30.0, {}, 0.5, opts);
  REQUIRE(traj.max_trace_drift < 1e-8);
  for (const Matrix& snap : traj.snapshots) {
    REQUIRE((snap - snap.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
    Eigen::SelfAdjointEigenSolver<Matrix> es(snap, Eigen::EigenvaluesOnly);
    REQUIRE(es.eigenvalues().minCoeff() > -1e-7);
  }
}

TEST_CASE("evolve: halving tolerances moves final observables by < 1e-6") {
  EffectiveParams e{-0.8, 0.1, true};
  const LindbladModel model = reduced_model(e, 4);
  const HilbertSpace space = reduced_space(4);
  std::vector<NamedOperator> obs;
  obs.emplace_back("energy", Operator(space, model.hamiltonian().mat));
  EvolveOptions coarse;  // defaults
  EvolveOptions fine;
  fine.rel_tol = 0.5e-9;
  fine.abs_tol = 0.5e-12;
  const Trajectory a = evolve(model, basis_state(space, {0}), 25.0, obs, 0.5, coarse);
  const Trajectory b = evolve(model, basis_state(space, {0}), 25.0, obs, 0.5, fine);
  REQUIRE(std::abs(a.observable("energy").back() - b.observable("energy").back()) < 1e-6);
}

TEST_CASE("evolve rejects invalid input") {
  EffectiveParams e{-0.8, 0.1, true};
  const LindbladModel model = reduced_model(e, 2);
  const DensityMatrix rho0 = basis_state(reduced_space(2), {0});
  REQUIRE_THROWS_AS(evolve(model, rho0, -1.0, {}, 0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(evolve(model, rho0, 1.0, {}, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(evolve(model, basis_state(reduced_space(3), {0}), 1.0, {}, 0.1),
                    std::invalid_argument);
}

TEST_CASE("steady_state_numeric") {
  SECTION("engine model reproduces the closed form") {
    const EngineParams p = reference_engine();
    const DensityMatrix rho = steady_state_numeric(engine_model(p));
    // Weights e^{0.2} : e^{1.0} : 1 normalized.
    const double z = std::exp(0.2) + std::exp(1.0) + 1.0;
    REQUIRE(rho.mat()(0, 0).real() == Catch::Approx(std::exp(0.2) / z).margin(1e-10));
    REQUIRE(rho.mat()(1, 1).real() == Catch::Approx(std::exp(1.0) / z).margin(1e-10));
    REQUIRE(rho.mat()(2, 2).real() == Catch::Approx(1.0 / z).margin(1e-10));
    REQUIRE((rho.mat() - engine_steady_state(p).mat()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("two-level effective model gives the inverted Gibbs weights") {
    const DensityMatrix rho = steady_state_numeric(single_tls_model());
    REQUIRE(rho.mat()(0, 0).real() == Catch::Approx(1.0 - kGibbs).margin(1e-10));
    REQUIRE(rho.mat()(1, 1).real() == Catch::Approx(kGibbs).margin(1e-10));
  }
  SECTION("reduced N = 2 model matches the truncated geometric state") {
    EffectiveParams e{-0.8, 0.1, true};
    const DensityMatrix rho = steady_state_numeric(reduced_model(e, 2));
    const double z = 1.0 + kExp08 + kExp08 * kExp08;  // Z_2 = 8.178573...
    REQUIRE(z == Catch::Approx(8.178573352887582).epsilon(1e-12));
    REQUIRE(rho.mat()(0, 0).real() == Catch::Approx(1.0 / z).margin(1e-10));
    REQUIRE(rho.mat()(1, 1).real() == Catch::Approx(kExp08 / z).margin(1e-10));
    REQUIRE(rho.mat()(2, 2).real() == Catch::Approx(kExp08 * kExp08 / z).margin(1e-10));
  }
  SECTION("degenerate null space is reported") {
    HilbertSpace space({2});
    const LindbladModel trivial(Operator(space, Matrix::Zero(2, 2)), {});
    REQUIRE_THROWS_AS(steady_state_numeric(trivial), std::runtime_error);
  }
  SECTION("dimension cap") {
    EffectiveParams e{-0.8, 0.1, true};
    REQUIRE_THROWS_AS(steady_state_numeric(reduced_model(e, 70)), std::invalid_argument);
  }
}
