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

// qbcharge — command-line front end. Reproduces the simulation figures as
// CSV (dynamics, steady-state sweeps, charging-time scaling, ergotropy),
// runs the microscopic engine–battery comparison and the cross-validation
// suite. Output is deterministic byte-for-byte for a fixed configuration.
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical failure,
// 3 validation failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qbcharge/qbcharge.hpp"

namespace {

using namespace qbcharge;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }

// Resolved configuration echoed at the top of every output.
class ConfigEcho {
 public:
  void add(const std::string& key, const std::string& value) { items_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add(const std::string& key, const std::vector<int>& values) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) joined += ' ';
      joined += std::to_string(values[i]);
    }
    add(key, joined);
  }

  void write(std::ostream& out, const std::string& command) const {
    out << "# qbcharge " << command << "\n";
    for (const auto& [k, v] : items_) out << "# " << k << " = " << v << "\n";
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out_ << ',';
      out_ << cols[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

// Stream to --out path or stdout.
struct OutputTarget {
  std::unique_ptr<std::ofstream> file;
  std::ostream* stream = &std::cout;

  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path);
      if (!*file) throw std::invalid_argument("cannot open output file: " + path);
      stream = file.get();
    }
  }
};

struct SharedConfig {
  double beta_e = -0.8;
  double gamma_e = 0.1;
  int n = 10;
  std::vector<int> n_list;
  double epsilon = 1e-3;
  double t_end = 0.0;      // 0: per-command default
  double record_dt = 0.0;  // 0: derived from t_end
  std::string out_path;
  int workers = 0;  // 0: hardware concurrency

  EffectiveParams effective() const { return EffectiveParams{beta_e, gamma_e, true}; }
};

struct EngineConfig {
  double beta_h_wh = 0.2;
  double beta_c_wc = 1.0;
  double omega_h = 2.0;
  double gamma_h = 1.0;
  double gamma_c = 1.0;
  double g = 0.01;
  int engines = 1;
  bool no_normalize = false;

  EngineParams params() const {
    return EngineParams::from_products(beta_h_wh, beta_c_wc, omega_h, gamma_h, gamma_c, g);
  }
};

void add_shared_flags(CLI::App* cmd, SharedConfig& cfg) {
  cmd->add_option("--beta-e", cfg.beta_e, "Effective inverse temperature times omega_0 (negative)");
  cmd->add_option("--gamma-e", cfg.gamma_e, "Effective damping rate in units of omega_0");
  cmd->add_option("--n", cfg.n, "Number of batteries");
  cmd->add_option("--n-list", cfg.n_list, "Battery counts for sweeps")->delimiter(',');
  cmd->add_option("--epsilon", cfg.epsilon, "Charging deficit threshold");
  cmd->add_option("--t-end", cfg.t_end, "Evolution horizon in units of 1/omega_0");
  cmd->add_option("--record-dt", cfg.record_dt, "Recording step (default t-end/400)");
  cmd->add_option("--out", cfg.out_path, "Output path (default stdout)");
  cmd->add_option("--workers", cfg.workers, "Worker threads for sweeps (default: cores)");
  cmd->set_config("--config", "", "Config file (key = value), flags take precedence");
}

void add_engine_flags(CLI::App* cmd, EngineConfig& cfg) {
  cmd->add_option("--beta-h-wh", cfg.beta_h_wh, "beta_h * omega_h");
  cmd->add_option("--beta-c-wc", cfg.beta_c_wc, "beta_c * omega_c");
  cmd->add_option("--omega-h", cfg.omega_h, "Upper engine level in units of omega_0");
  cmd->add_option("--gamma-h", cfg.gamma_h, "Hot-bath relaxation rate");
  cmd->add_option("--gamma-c", cfg.gamma_c, "Cold-bath relaxation rate");
  cmd->add_option("--g", cfg.g, "Engine-battery coupling");
  cmd->add_option("--engines", cfg.engines, "Number of engines M");
  cmd->add_flag("--no-normalize", cfg.no_normalize, "Drop the 1/sqrt(N) coupling normalization");
}

void echo_shared(ConfigEcho& echo, const SharedConfig& cfg) {
  echo.add("beta-e", cfg.beta_e);
  echo.add("gamma-e", cfg.gamma_e);
  echo.add("epsilon", cfg.epsilon);
  echo.add("workers", cfg.workers);
}

std::vector<int> default_sweep_list() {
  return {1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 30, 50, 70, 100, 150, 200, 300, 500, 1000};
}

std::vector<int> default_charging_list() { return {1, 2, 5, 10, 20, 50, 100, 200, 500}; }

// -------------------------------------------------------------------------
// dynamics: time series of collective vs individual charging at fixed N.
int cmd_dynamics(const SharedConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 10000) throw std::invalid_argument("dynamics: need 1 <= n <= 10^4");
  const EffectiveParams e = cfg.effective();
  e.validate_for_charging();
  const double t_end = cfg.t_end > 0.0 ? cfg.t_end : 80.0;
  const double record_dt = cfg.record_dt > 0.0 ? cfg.record_dt : t_end / 400.0;

  // Collective protocol on the reduced space; the dense path tracks
  // off-diagonals up to N = 64, above that the diagonal fast path applies
  // (equivalent for the diagonal initial state, see the test suite).
  Trajectory coll;
  if (cfg.n <= 64) {
    const LindbladModel model = reduced_model(e, cfg.n);
    const HilbertSpace space = reduced_space(cfg.n);
    Matrix h = model.hamiltonian().mat;
    Matrix h_sq = h;
    h_sq.diagonal() = h.diagonal().array().square();
    std::vector<NamedOperator> obs;
    obs.emplace_back("energy", Operator(space, h));
    obs.emplace_back("energy_sq", Operator(space, h_sq));
    coll = evolve(model, basis_state(space, {0}), t_end, obs, record_dt);
  } else {
    coll = evolve_reduced_diagonal(e, cfg.n, t_end, record_dt);
  }
  const Trajectory single = evolve_reduced_diagonal(e, 1, t_end, record_dt);

  const Capacity cap = capacity_exact(e.beta_e_omega0, cfg.n);
  const double sigma_ss = fluctuation_exact(e.beta_e_omega0, cfg.n);
  const SteadyMetrics ind = individual_metrics(e.beta_e_omega0, cfg.n);

  OutputTarget target(cfg.out_path);
  ConfigEcho echo;
  echo_shared(echo, cfg);
  echo.add("n", cfg.n);
  echo.add("t-end", t_end);
  echo.add("record-dt", record_dt);
  echo.write(*target.stream, "dynamics");

  CsvWriter csv(*target.stream);
  csv.header({"time", "energy_collective", "energy_individual", "sigma_collective",
              "sigma_individual", "energy_collective_ss", "energy_individual_ss",
              "sigma_collective_ss", "sigma_individual_ss"});
  const std::vector<double>& ec = coll.observable("energy");
  const std::vector<double>& ec2 = coll.observable("energy_sq");
  const std::vector<double>& e1 = single.observable("energy");
  const std::vector<double>& e12 = single.observable("energy_sq");
  for (std::size_t k = 0; k < coll.times.size(); ++k) {
    const double var_c = std::max(0.0, ec2[k] - ec[k] * ec[k]);
    const double var_1 = std::max(0.0, e12[k] - e1[k] * e1[k]);
    csv.row({fmt(coll.times[k]), fmt(ec[k]), fmt(cfg.n * e1[k]), fmt(std::sqrt(var_c)),
             fmt(std::sqrt(cfg.n * var_1)), fmt(cap.total), fmt(ind.energy), fmt(sigma_ss),
             fmt(ind.sigma)});
  }
  return 0;
}

// -------------------------------------------------------------------------
// steady-sweep: closed-form steady-state figures vs N; --from-dynamics
// recomputes energy and fluctuation by long-time integration.
int cmd_steady_sweep(const SharedConfig& cfg, bool from_dynamics) {
  const EffectiveParams e = cfg.effective();
  e.validate_for_charging();
  std::vector<int> n_list = cfg.n_list.empty() ? default_sweep_list() : cfg.n_list;
  for (int n : n_list)
    if (n < 1 || (from_dynamics && n > 10000))
      throw std::invalid_argument("steady-sweep: invalid battery count in n-list");

  struct Row {
    double density_coll, density_ind, sigma_coll, sigma_ind, ratio_coll, ratio_ind;
  };
  std::vector<Row> rows(n_list.size());
  detail::parallel_for(n_list.size(), cfg.workers, [&](std::size_t i) {
    const int n = n_list[i];
    const SteadyMetrics ind = individual_metrics(e.beta_e_omega0, n);
    const SteadyMetrics coll = collective_metrics(e.beta_e_omega0, n);
    double density = coll.energy_density;
    double sigma = coll.sigma;
    if (from_dynamics) {
      const SteadySimulation sim = steady_by_integration(e, n);
      density = sim.energy / n;
      sigma = sim.sigma;
    }
    rows[i] = Row{density, ind.energy_density, sigma, ind.sigma, coll.ergotropy_ratio,
                  ind.ergotropy_ratio};
  });

  OutputTarget target(cfg.out_path);
  ConfigEcho echo;
  echo_shared(echo, cfg);
  echo.add("n-list", n_list);
  echo.add("from-dynamics", from_dynamics);
  echo.write(*target.stream, "steady-sweep");

  CsvWriter csv(*target.stream);
  csv.header({"n", "density_collective", "density_individual", "sigma_collective",
              "sigma_individual", "ergotropy_ratio_collective", "ergotropy_ratio_individual"});
  for (std::size_t i = 0; i < n_list.size(); ++i)
    csv.row({fmt(n_list[i]), fmt(rows[i].density_coll), fmt(rows[i].density_ind),
             fmt(rows[i].sigma_coll), fmt(rows[i].sigma_ind), fmt(rows[i].ratio_coll),
             fmt(rows[i].ratio_ind)});
  return 0;
}

// -------------------------------------------------------------------------
// charging-time: tau_N sweep with the speed ratio and its N/log N
// normalization. Non-convergent points are reported, not fatal.
int cmd_charging_time(const SharedConfig& cfg) {
  const EffectiveParams e = cfg.effective();
  e.validate_for_charging();
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    throw std::invalid_argument("charging-time: epsilon must lie in (0,1)");
  std::vector<int> n_list = cfg.n_list.empty() ? default_charging_list() : cfg.n_list;
  for (int n : n_list)
    if (n < 1) throw std::invalid_argument("charging-time: invalid battery count in n-list");

  const double tau_1 = charging_time_tau(e, 1, cfg.epsilon);
  std::vector<ChargingMetrics> rows(n_list.size());
  std::vector<std::string> failures(n_list.size());
  detail::parallel_for(n_list.size(), cfg.workers, [&](std::size_t i) {
    try {
      rows[i] = charging_metrics(e, n_list[i], cfg.epsilon, tau_1);
    } catch (const std::exception& ex) {
      rows[i] = ChargingMetrics{n_list[i], std::nan(""), cfg.epsilon, std::nan(""), std::nan(""),
                                n_list[i] >= 2
                                    ? cascade_time_estimate(e.beta_e_omega0, e.gamma_e, n_list[i])
                                    : 0.0};
      failures[i] = ex.what();
    }
  });

  OutputTarget target(cfg.out_path);
  ConfigEcho echo;
  echo_shared(echo, cfg);
  echo.add("n-list", n_list);
  echo.write(*target.stream, "charging-time");

  CsvWriter csv(*target.stream);
  csv.header({"n", "tau", "speed_ratio", "normalized_ratio", "cascade_estimate"});
  for (const ChargingMetrics& m : rows)
    csv.row({fmt(m.n), fmt(m.tau), fmt(m.speed_ratio), fmt(m.normalized_ratio),
             fmt(m.cascade_estimate)});
  for (std::size_t i = 0; i < failures.size(); ++i)
    if (!failures[i].empty())
      std::cerr << "charging-time: N = " << n_list[i] << " did not converge: " << failures[i]
                << "\n";
  return 0;
}

// -------------------------------------------------------------------------
// ergotropy: closed-form extractable energy vs N; --numeric adds the
// eigen-sort cross-check column (N <= 12).
int cmd_ergotropy(const SharedConfig& cfg, bool numeric) {
  const EffectiveParams e = cfg.effective();
  e.validate_for_charging();
  std::vector<int> n_list = cfg.n_list.empty() ? default_sweep_list() : cfg.n_list;
  for (int n : n_list) {
    if (n < 1) throw std::invalid_argument("ergotropy: invalid battery count in n-list");
    if (numeric && n > kMaxFullBatteries)
      throw std::invalid_argument("ergotropy: --numeric requires N <= 12");
  }

  OutputTarget target(cfg.out_path);
  ConfigEcho echo;
  echo_shared(echo, cfg);
  echo.add("n-list", n_list);
  echo.add("numeric", numeric);
  echo.write(*target.stream, "ergotropy");

  CsvWriter csv(*target.stream);
  std::vector<std::string> cols = {"n",      "energy_total",          "ergotropy",
                                   "locked", "ergotropy_ratio_collective", "ergotropy_ratio_individual"};
  if (numeric) cols.push_back("ergotropy_numeric");
  csv.header(cols);
  for (int n : n_list) {
    const SteadyMetrics coll = collective_metrics(e.beta_e_omega0, n);
    const SteadyMetrics ind = individual_metrics(e.beta_e_omega0, n);
    std::vector<std::string> cells = {fmt(n),           fmt(coll.energy), fmt(coll.ergotropy),
                                      fmt(coll.locked), fmt(coll.ergotropy_ratio),
                                      fmt(ind.ergotropy_ratio)};
    if (numeric) {
      const ReducedState rs =
          ReducedState::from_populations(n, steady_state_populations(e.beta_e_omega0, n));
      const Operator h = effective_battery_model(e, n, /*full_space=*/true).hamiltonian();
      cells.push_back(fmt(ergotropy_numeric(embed_reduced(rs), h)));
    }
    csv.row(cells);
  }
  return 0;
}

// -------------------------------------------------------------------------
// microscopic: coupled engine-battery run vs the effective prediction.
int cmd_microscopic(const SharedConfig& cfg, const EngineConfig& eng) {
  const EngineParams p = eng.params();
  const EffectiveParams e = effective_params(p);
  const int n = cfg.n;
  const int m = eng.engines;
  const bool normalize = !eng.no_normalize;
  const LindbladModel model = coupled_model(p, n, m, CouplingScheme::kCollective, normalize);

  // Total effective rate: each engine contributes the printed Gamma_e
  // (computed at its effective coupling).
  const double gamma_total = e.gamma_e * m * (normalize ? 1.0 / n : 1.0);
  const EffectiveParams e_total{e.beta_e_omega0, gamma_total, true};

  const double rate = gamma_total * (1.0 + std::exp(-e.beta_e_omega0));
  const double t_end = cfg.t_end > 0.0 ? cfg.t_end : 4.0 / rate;
  const double record_dt = cfg.record_dt > 0.0 ? cfg.record_dt : t_end / 400.0;

  std::vector<NamedOperator> obs;
  const HilbertSpace& space = model.space();
  Matrix battery_h = Matrix::Zero(space.total_dim(), space.total_dim());
  for (int k = 0; k < n; ++k)
    battery_h += embed(Operator(HilbertSpace({2}), ket_bra(2, 1, 1)), m + k, space).mat;
  obs.emplace_back("battery_energy", Operator(space, battery_h));
  for (int level = 0; level < 3; ++level) {
    Matrix proj = Matrix::Zero(space.total_dim(), space.total_dim());
    for (int j = 0; j < m; ++j)
      proj += embed(Operator(HilbertSpace({3}), ket_bra(3, level, level)), j, space).mat;
    obs.emplace_back("engine_p" + std::to_string(level), Operator(space, proj * (1.0 / m)));
  }

  // Engines start in their steady state, batteries empty.
  Operator rho0 = engine_steady_state(p).op();
  for (int j = 1; j < m; ++j) rho0 = kron(rho0, engine_steady_state(p).op());
  for (int k = 0; k < n; ++k) rho0 = kron(rho0, basis_state(HilbertSpace({2}), {0}).op());

  EvolveOptions opts;
  opts.rel_tol = 1e-8;
  opts.abs_tol = 1e-11;
  const Trajectory traj = evolve(model, DensityMatrix(rho0), t_end, obs, record_dt, opts);
  const Trajectory effective_traj = evolve_reduced_diagonal(e_total, n, t_end, record_dt);

  OutputTarget target(cfg.out_path);
  ConfigEcho echo;
  echo.add("beta-h-wh", eng.beta_h_wh);
  echo.add("beta-c-wc", eng.beta_c_wc);
  echo.add("omega-h", eng.omega_h);
  echo.add("gamma-h", eng.gamma_h);
  echo.add("gamma-c", eng.gamma_c);
  echo.add("g", eng.g);
  echo.add("engines", m);
  echo.add("n", n);
  echo.add("normalize", normalize);
  echo.add("t-end", t_end);
  echo.add("record-dt", record_dt);
  echo.add("beta-e-omega0", e.beta_e_omega0);
  echo.add("gamma-e-formula", e.gamma_e);
  echo.add("gamma-e-total", gamma_total);
  echo.add("timescale-separation-ratio", timescale_separation_ratio(p, n));
  echo.write(*target.stream, "microscopic");

  CsvWriter csv(*target.stream);
  csv.header({"time", "battery_energy", "battery_energy_effective", "engine_p0", "engine_p1",
              "engine_p2"});
  const std::vector<double>& be = traj.observable("battery_energy");
  const std::vector<double>& ee = effective_traj.observable("energy");
  const std::vector<double>& p0 = traj.observable("engine_p0");
  const std::vector<double>& p1 = traj.observable("engine_p1");
  const std::vector<double>& p2 = traj.observable("engine_p2");
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    csv.row({fmt(traj.times[k]), fmt(be[k]), fmt(ee[k]), fmt(p0[k]), fmt(p1[k]), fmt(p2[k])});
  return 0;
}

// -------------------------------------------------------------------------
// validate: cross-validation report, exit 3 on any failure.
int cmd_validate(const SharedConfig& cfg, const EngineConfig& eng) {
  ValidationConfig vcfg;
  vcfg.engine = eng.params();
  vcfg.effective = cfg.effective();
  vcfg.effective.validate_for_charging();

  OutputTarget target(cfg.out_path);
  ConfigEcho echo;
  echo_shared(echo, cfg);
  echo.add("beta-h-wh", eng.beta_h_wh);
  echo.add("beta-c-wc", eng.beta_c_wc);
  echo.add("omega-h", eng.omega_h);
  echo.add("g", eng.g);
  echo.write(*target.stream, "validate");

  const std::vector<CheckResult> results = run_validation_suite(vcfg);
  int failed = 0;
  for (const CheckResult& r : results) {
    *target.stream << (r.pass ? "PASS " : "FAIL ") << r.name << "  value=" << fmt(r.value)
                   << "  tol=" << fmt(r.tolerance);
    if (!r.note.empty()) *target.stream << "  (" << r.note << ")";
    *target.stream << "\n";
    if (!r.pass) ++failed;
  }
  *target.stream << "RESULT: " << (results.size() - failed) << "/" << results.size()
                 << " checks passed\n";
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for dissipative charging of two-level quantum batteries by "
               "three-level heat engines"};
  app.require_subcommand(1);

  SharedConfig dyn_cfg, sweep_cfg, charge_cfg, ergo_cfg, micro_cfg, val_cfg;
  EngineConfig micro_eng, val_eng;
  bool from_dynamics = false;
  bool numeric = false;

  CLI::App* dynamics = app.add_subcommand("dynamics", "Charging time series at fixed N");
  add_shared_flags(dynamics, dyn_cfg);

  CLI::App* sweep = app.add_subcommand("steady-sweep", "Steady-state figures of merit vs N");
  add_shared_flags(sweep, sweep_cfg);
  sweep->add_flag("--from-dynamics", from_dynamics,
                  "Recompute the sweep by long-time integration instead of closed forms");

  CLI::App* charging = app.add_subcommand("charging-time", "tau_N, speed ratio and N/log N scaling");
  add_shared_flags(charging, charge_cfg);

  CLI::App* ergotropy = app.add_subcommand("ergotropy", "Extractable energy vs N");
  add_shared_flags(ergotropy, ergo_cfg);
  ergotropy->add_flag("--numeric", numeric, "Add the eigen-sort cross-check column (N <= 12)");

  CLI::App* microscopic =
      app.add_subcommand("microscopic", "Coupled engine-battery run vs the effective model");
  add_shared_flags(microscopic, micro_cfg);
  add_engine_flags(microscopic, micro_eng);

  CLI::App* validate = app.add_subcommand("validate", "Cross-validation suite");
  add_shared_flags(validate, val_cfg);
  add_engine_flags(validate, val_eng);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (dynamics->parsed()) return cmd_dynamics(dyn_cfg);
    if (sweep->parsed()) return cmd_steady_sweep(sweep_cfg, from_dynamics);
    if (charging->parsed()) return cmd_charging_time(charge_cfg);
    if (ergotropy->parsed()) return cmd_ergotropy(ergo_cfg, numeric);
    if (microscopic->parsed()) return cmd_microscopic(micro_cfg, micro_eng);
    if (validate->parsed()) return cmd_validate(val_cfg, val_eng);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "internal consistency failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
