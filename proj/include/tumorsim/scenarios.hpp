#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tumorsim/domain.hpp"
#include "tumorsim/params.hpp"
#include "tumorsim/solver.hpp"
#include "tumorsim/verify.hpp"

namespace tumorsim {

/// How the vessel region enters the drug source term.
enum class SourceSampling {
  cell,  ///< covered fraction of each node's dual cell
  node,  ///< 0/1 node membership
};

std::string_view to_string(SourceSampling s);
/// Throws Error(ConfigError).
SourceSampling parse_sampling(std::string_view text);

/// One experiment: geometry, rates, resolution and output times. The final
/// time is model.T.
struct ScenarioSpec {
  int id = 0;  ///< 1..5 for the built-ins, 0 for custom runs
  std::string name;
  int dim = 1;
  double length = 1.0;
  int n = 50;
  Region omega;
  ModelParams model;
  std::vector<double> snapshot_times;
  SourceSampling sampling = SourceSampling::cell;

  double t_end() const noexcept { return model.T; }
  bool operator==(const ScenarioSpec&) const = default;
};

/// Shared rates of every built-in experiment; alpha_A, mu and sigma are
/// left at the values of the first one.
ModelParams base_params();

/// Throws Error(UnknownScenario) unless 1 <= id <= 5.
ScenarioSpec builtin_scenario(int id);
std::vector<ScenarioSpec> builtin_scenarios();

/// Equal up to id and name.
bool same_experiment(const ScenarioSpec& a, const ScenarioSpec& b);

/// Validates rates, grid and region; throws the first Error found.
ScenarioSpec validate_spec(ScenarioSpec spec);

Grid scenario_grid(const ScenarioSpec& spec);
/// N = N2, A = A2, D = 0 everywhere.
State initial_state(const ScenarioSpec& spec);
/// The vessel-region weight multiplying mu in the drug equation.
Field source_field(const ScenarioSpec& spec);
/// RK4, default dt, t_end = model.T and the scenario's snapshot times.
SolverConfig default_solver_config(const ScenarioSpec& spec);

enum class Outcome { persistence, extinction };
std::string_view to_string(Outcome o);

struct OutcomeThresholds {
  double extinction = 1e-3;
  double stationary = 1e-4;
};

struct Classification {
  Outcome outcome = Outcome::persistence;
  double max_A_final = 0.0;
  double min_N_final = 0.0;
  bool near_stationary = false;
  double stationary_gap = 0.0;  ///< |A(t_end) - A(t_end - lag)|_inf; inf without a lagged state
};

Classification classify_outcome(const StateTrajectory& traj, const OutcomeThresholds& th = {});

struct OutcomeReport {
  Classification classification;
  AuditReport audit;
  std::optional<AuditReport> picard_audit;
  std::optional<double> picard_gap;  ///< worst snapshot gap between MOL and Picard
  int picard_iterations = 0;
  double wall_seconds = 0.0;

  Outcome outcome() const noexcept { return classification.outcome; }
  bool passed() const;
};

struct RunOptions {
  bool picard_check = false;
  OutcomeThresholds thresholds;
  /// Largest MOL/Picard gap accepted by passed().
  double agreement_tol = 1e-3;
};

struct ScenarioRun {
  OutcomeReport report;
  StateTrajectory trajectory;
  std::optional<StateTrajectory> picard;
};

/// Worst L-inf gap over N, A and D between snapshots with the same
/// requested times.
double snapshot_gap(const StateTrajectory& a, const StateTrajectory& b);

/// Integrates the scenario, audits it and classifies the outcome. Solver
/// errors propagate.
ScenarioRun run_scenario(const ScenarioSpec& spec, const SolverConfig& cfg, const RunOptions& opts = {});

}  // namespace tumorsim
