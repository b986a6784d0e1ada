#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tumorsim/domain.hpp"
#include "tumorsim/kernels.hpp"
#include "tumorsim/params.hpp"

namespace tumorsim {

enum class Method { rk4, explicit_euler };

std::string_view to_string(Method method);
/// Accepts "rk4", "explicit-euler" and "euler". Throws Error(ConfigError).
Method parse_method(std::string_view text);

struct PicardOptions {
  double tol = 1e-8;  ///< sup-norm change between iterates that stops the loop
  int max_iter = 50;
  /// Constant-in-time starting guess; unset means D0 held constant in time.
  std::optional<double> initial_guess;
  /// Solver steps between stored iterate stamps; 0 picks the smallest stride
  /// that keeps one iterate under ~12M doubles.
  std::size_t history_stride = 0;

  bool operator==(const PicardOptions&) const = default;
};

struct SolverConfig {
  Method method = Method::rk4;
  double dt = 0.0;  ///< 0 selects default_time_step
  double t_end = 25.0;
  std::vector<double> snapshot_times;
  PicardOptions picard;
  /// The state at t_end - lag is kept for stationarity checks.
  double stationarity_lag = 1.0;

  bool operator==(const SolverConfig&) const = default;
};

/// Tolerances of the invariant region.
inline constexpr double kNegativityTolerance = 1e-12;
inline constexpr double kCeilingTolerance = 1e-10;
/// A run aborts once a field leaves the invariant region by more than this.
inline constexpr double kAbortExcess = 1e-6;

/// 0.9 * h^2 / (2 dim sigma): explicit diffusion limit with a safety factor.
double stability_ceiling(const Grid& grid, double sigma);
/// min(0.9 * h^2 / (4 sigma), 1e-3).
double default_time_step(const Grid& grid, double sigma);

struct State {
  double t = 0.0;
  Field N, A, D;

  bool operator==(const State&) const = default;
};

struct Snapshot {
  double requested_time = 0.0;  ///< the time asked for; state.t is the nearest step
  State state;
};

struct Extremum {
  double value = 0.0;
  std::size_t node = 0;
  double t = 0.0;
};

/// Per-field minima and maxima over every accepted step.
struct TrajectoryExtrema {
  Extremum min_N{std::numeric_limits<double>::infinity()};
  Extremum max_N{-std::numeric_limits<double>::infinity()};
  Extremum min_A{std::numeric_limits<double>::infinity()};
  Extremum max_A{-std::numeric_limits<double>::infinity()};
  Extremum min_D{std::numeric_limits<double>::infinity()};
  Extremum max_D{-std::numeric_limits<double>::infinity()};

  void observe_normal(double t, std::span<const double> values);
  void observe_tumor(double t, std::span<const double> values);
  void observe_drug(double t, std::span<const double> values);
};

struct StateTrajectory {
  Grid grid;
  Method method = Method::rk4;
  double dt = 0.0;
  std::size_t steps = 0;
  State initial;
  State final_state;
  std::optional<State> lagged;  ///< state near t_end - stationarity_lag
  std::vector<Snapshot> snapshots;
  TrajectoryExtrema extrema;
  std::optional<DrugHistory> history;
  int picard_iterations = 0;
  double picard_residual = 0.0;

  /// Snapshot whose requested time is closest to t, or nullptr if none.
  const Snapshot* snapshot_near(double t) const;
};

struct Derivatives {
  Field dN, dA, dD;
};

/// Pointwise right-hand side of the coupled system. Throws
/// Error(GridMismatch) when the fields do not share one grid.
Derivatives rhs(const State& s, const Field& chi, const ModelParams& p);

struct MolOptions {
  /// Record D into trajectory.history every this many steps; 0 records nothing.
  std::size_t history_stride = 0;
};

/// Direct method-of-lines integration with fixed steps. dt is shrunk
/// slightly so that t_end is hit exactly. Throws Error(ConfigError) for a dt
/// above the stability ceiling and Error(Instability) when the state turns
/// non-finite or leaves the invariant region by more than kAbortExcess.
StateTrajectory integrate_mol(const State& s0, const SolverConfig& cfg, const Field& chi,
                              const ModelParams& p, MolOptions opts = {});

/// Fixed-point iteration on the drug trajectory: each sweep evaluates the
/// closed-form tumor/normal operators on the previous drug iterate and then
/// integrates the linear drug equation they induce. N and A of the result
/// are the operators applied to the converged drug trajectory. Throws
/// Error(NoConvergence) after max_iter sweeps.
StateTrajectory picard_solve(const Field& D0, const Field& N0, const Field& A0,
                             const SolverConfig& cfg, const Field& chi, const ModelParams& p);

}  // namespace tumorsim
