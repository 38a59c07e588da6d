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

// params.hpp — Bath/coupling parameters of the three-level engine and the
// derived effective battery parameters.

#pragma once

#include <cmath>
#include <stdexcept>

namespace qbcharge {

// Engine and coupling parameters, all in units of omega_0 (inverse
// temperatures in 1/omega_0). omega_c = omega_h - omega_0 is derived.
// Work extraction requires beta_h/beta_c < omega_c/omega_h < 1; that
// condition is enforced where charging is actually set up (see
// effective_params), so that boundary diagnostics like beta_h = beta_c = 0
// remain constructible.
struct EngineParams {
  double beta_h = 0.0;
  double beta_c = 0.0;
  double omega_h = 2.0;
  double omega_0 = 1.0;
  double gamma_h = 1.0;
  double gamma_c = 1.0;
  double g = 0.01;

  double omega_c() const { return omega_h - omega_0; }

  // Fix the dimensionless products beta_h*omega_h and beta_c*omega_c that
  // the formulas actually depend on.
  static EngineParams from_products(double beta_h_omega_h, double beta_c_omega_c, double omega_h,
                                    double gamma_h, double gamma_c, double g,
                                    double omega_0 = 1.0) {
    EngineParams p;
    p.omega_h = omega_h;
    p.omega_0 = omega_0;
    p.gamma_h = gamma_h;
    p.gamma_c = gamma_c;
    p.g = g;
    p.validate_structure();
    p.beta_h = beta_h_omega_h / p.omega_h;
    p.beta_c = beta_c_omega_c / p.omega_c();
    p.validate();
    return p;
  }

  void validate_structure() const {
    if (!(omega_0 > 0.0) || !(omega_h > omega_0))
      throw std::invalid_argument("EngineParams: require omega_h > omega_0 > 0");
    if (!(gamma_h > 0.0) || !(gamma_c > 0.0))
      throw std::invalid_argument("EngineParams: relaxation rates must be positive");
    if (!(g >= 0.0)) throw std::invalid_argument("EngineParams: coupling must be nonnegative");
  }

  void validate() const {
    validate_structure();
    if (beta_h < 0.0 || beta_c < 0.0)
      throw std::invalid_argument("EngineParams: bath temperatures must be nonnegative");
  }

  // Population inversion between |0> and |1> in the engine steady state.
  bool population_inversion() const { return beta_h * omega_h < beta_c * omega_c(); }
};

// Effective battery parameters after adiabatic elimination of the engines:
// a (negative) inverse temperature times omega_0 and a damping rate.
struct EffectiveParams {
  double beta_e_omega0 = -0.8;
  double gamma_e = 0.1;
  // Set by env_modified_params: whether the modified temperature stays
  // negative, i.e. charging survives the environmental dissipation.
  bool stable_charging = true;

  void validate_for_charging() const {
    if (!(beta_e_omega0 < 0.0))
      throw std::invalid_argument("EffectiveParams: beta_e*omega_0 must be negative (inversion)");
    if (!(gamma_e > 0.0)) throw std::invalid_argument("EffectiveParams: gamma_e must be positive");
  }
};

}  // namespace qbcharge
