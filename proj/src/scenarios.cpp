#include "tumorsim/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "tumorsim/error.hpp"

namespace tumorsim {

std::string_view to_string(SourceSampling s) {
  return s == SourceSampling::cell ? "cell" : "node";
}

SourceSampling parse_sampling(std::string_view text) {
  if (text == "cell") return SourceSampling::cell;
  if (text == "node") return SourceSampling::node;
  throw Error(ErrorCode::ConfigError, "unknown source sampling '" + std::string(text) + "'");
}

std::string_view to_string(Outcome o) {
  return o == Outcome::persistence ? "persistence" : "extinction";
}

ModelParams base_params() {
  ModelParams p;
  p.r_N = 1.0;
  p.mu_N = 1.0;
  p.beta_1 = 1.5;
  p.r_A = 1.0;
  p.k_A = 1.0;
  p.mu_A = 0.05;
  p.eps_A = 0.05;
  p.alpha_N = 1.0;
  p.alpha_A = 5.0;
  p.gamma_N = 0.1;
  p.gamma_A = 1.0;
  p.mu = 3.0;
  p.tau = 0.9;
  p.sigma = 0.1;
  p.T = 25.0;
  return validate_params(p);
}

namespace {

struct Row {
  double alpha_A, mu, sigma;
};

constexpr Row kRows[] = {
    {5.0, 3.0, 0.1}, {10.0, 3.0, 0.1}, {10.0, 6.0, 0.1}, {10.0, 3.0, 0.2}, {20.0, 3.0, 0.1},
};

}  // namespace

ScenarioSpec builtin_scenario(int id) {
  if (id < 1 || id > 5) throw Error(ErrorCode::UnknownScenario, "no built-in scenario " + std::to_string(id));
  const Row& row = kRows[id - 1];
  ScenarioSpec s;
  s.id = id;
  s.name = "simulation-" + std::to_string(id);
  s.model = base_params();
  s.model.alpha_A = row.alpha_A;
  s.model.mu = row.mu;
  s.model.sigma = row.sigma;
  s.model = validate_params(s.model);
  if (id == 1) {
    s.dim = 2;
    s.omega = Region::box(0.45, 0.55, 0.45, 0.55);
    s.snapshot_times = {0.0, 1.0, 15.0};
  } else {
    s.dim = 1;
    s.omega = Region::interval(0.0, 0.1);
    s.snapshot_times = {0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 25.0};
  }
  return s;
}

std::vector<ScenarioSpec> builtin_scenarios() {
  std::vector<ScenarioSpec> out;
  for (int id = 1; id <= 5; ++id) out.push_back(builtin_scenario(id));
  return out;
}

bool same_experiment(const ScenarioSpec& a, const ScenarioSpec& b) {
  ScenarioSpec x = a;
  x.id = b.id;
  x.name = b.name;
  return x == b;
}

ScenarioSpec validate_spec(ScenarioSpec spec) {
  spec.model = validate_params(spec.model);
  const Grid grid = build_grid(spec.dim, spec.length, spec.n);
  check_region(spec.omega, grid);
  for (double t : spec.snapshot_times) {
    if (!(t >= 0.0) || t > spec.model.T)
      throw Error(ErrorCode::ValidationError, "snapshot time outside [0, T]");
  }
  std::sort(spec.snapshot_times.begin(), spec.snapshot_times.end());
  return spec;
}

Grid scenario_grid(const ScenarioSpec& spec) { return build_grid(spec.dim, spec.length, spec.n); }

State initial_state(const ScenarioSpec& spec) {
  const Grid grid = scenario_grid(spec);
  const Equilibrium eq = equilibrium_no_treatment(spec.model);
  return State{0.0, Field(grid, eq.N2), Field(grid, eq.A2), Field(grid, 0.0)};
}

Field source_field(const ScenarioSpec& spec) {
  const Grid grid = scenario_grid(spec);
  return spec.sampling == SourceSampling::cell ? coverage_fraction(spec.omega, grid)
                                               : indicator(spec.omega, grid);
}

SolverConfig default_solver_config(const ScenarioSpec& spec) {
  SolverConfig cfg;
  cfg.t_end = spec.model.T;
  cfg.snapshot_times = spec.snapshot_times;
  return cfg;
}

Classification classify_outcome(const StateTrajectory& traj, const OutcomeThresholds& th) {
  Classification c;
  c.max_A_final = traj.final_state.A.max();
  c.min_N_final = traj.final_state.N.min();
  c.outcome = c.max_A_final < th.extinction ? Outcome::extinction : Outcome::persistence;
  if (traj.lagged) {
    c.stationary_gap = max_abs_difference(traj.final_state.A, traj.lagged->A);
    c.near_stationary = c.stationary_gap < th.stationary;
  } else {
    c.stationary_gap = std::numeric_limits<double>::infinity();
  }
  return c;
}

bool OutcomeReport::passed() const {
  return audit.passed() && (!picard_audit || picard_audit->passed());
}

double snapshot_gap(const StateTrajectory& a, const StateTrajectory& b) {
  double gap = 0.0;
  for (const auto& sa : a.snapshots) {
    const Snapshot* sb = b.snapshot_near(sa.requested_time);
    if (!sb || sb->requested_time != sa.requested_time)
      throw Error(ErrorCode::GridMismatch, "snapshot times differ between trajectories");
    gap = std::max({gap, max_abs_difference(sa.state.N, sb->state.N),
                    max_abs_difference(sa.state.A, sb->state.A),
                    max_abs_difference(sa.state.D, sb->state.D)});
  }
  return gap;
}

ScenarioRun run_scenario(const ScenarioSpec& raw, const SolverConfig& cfg, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioSpec spec = validate_spec(raw);
  ModelParams horizon = spec.model;
  horizon.T = cfg.t_end;
  horizon = validate_params(horizon);

  const State s0 = initial_state(spec);
  const Field chi = source_field(spec);

  ScenarioRun run;
  run.trajectory = integrate_mol(s0, cfg, chi, horizon);
  run.report.classification = classify_outcome(run.trajectory, opts.thresholds);
  run.report.audit = audit_bounds(run.trajectory, horizon);
  if (opts.picard_check) {
    run.picard = picard_solve(s0.D, s0.N, s0.A, cfg, chi, horizon);
    run.report.picard_audit = audit_bounds(*run.picard, horizon);
    run.report.picard_audit->suite = "bounds-picard";
    run.report.picard_iterations = run.picard->picard_iterations;
    const double gap = snapshot_gap(run.trajectory, *run.picard);
    run.report.picard_gap = gap;
    run.report.picard_audit->checks.push_back(
        CheckResult{"method_agreement", gap <= opts.agreement_tol, opts.agreement_tol - gap, 0, cfg.t_end, {}});
  }
  run.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace tumorsim
