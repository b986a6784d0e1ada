#include "tumorsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tumorsim/error.hpp"

namespace tumorsim {

std::string_view to_string(Method method) {
  return method == Method::rk4 ? "rk4" : "explicit-euler";
}

Method parse_method(std::string_view text) {
  if (text == "rk4") return Method::rk4;
  if (text == "explicit-euler" || text == "euler") return Method::explicit_euler;
  throw Error(ErrorCode::ConfigError, "unknown method '" + std::string(text) + "'");
}

double stability_ceiling(const Grid& grid, double sigma) {
  const double h = grid.spacing();
  return 0.9 * h * h / (2.0 * grid.dim() * sigma);
}

double default_time_step(const Grid& grid, double sigma) {
  const double h = grid.spacing();
  return std::min(0.9 * h * h / (4.0 * sigma), 1e-3);
}

namespace {

void observe(Extremum& lo, Extremum& hi, double t, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < lo.value) lo = {values[i], i, t};
    if (values[i] > hi.value) hi = {values[i], i, t};
  }
}

}  // namespace

void TrajectoryExtrema::observe_normal(double t, std::span<const double> values) {
  observe(min_N, max_N, t, values);
}
void TrajectoryExtrema::observe_tumor(double t, std::span<const double> values) {
  observe(min_A, max_A, t, values);
}
void TrajectoryExtrema::observe_drug(double t, std::span<const double> values) {
  observe(min_D, max_D, t, values);
}

const Snapshot* StateTrajectory::snapshot_near(double t) const {
  const Snapshot* best = nullptr;
  for (const auto& s : snapshots) {
    if (!best || std::abs(s.requested_time - t) < std::abs(best->requested_time - t)) best = &s;
  }
  return best;
}

namespace {

struct TimeGrid {
  double dt = 0.0;
  std::size_t steps = 0;

  std::size_t nearest_step(double t) const {
    const double k = std::round(t / dt);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(steps)));
  }
};

TimeGrid resolve_time_grid(const SolverConfig& cfg, const Grid& grid, double sigma) {
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
    throw Error(ErrorCode::ConfigError, "t_end must be positive");
  }
  const double ceiling = stability_ceiling(grid, sigma);
  double dt = cfg.dt > 0.0 ? cfg.dt : default_time_step(grid, sigma);
  if (cfg.dt < 0.0) throw Error(ErrorCode::ConfigError, "dt must be positive");
  if (dt > ceiling) {
    throw Error(ErrorCode::ConfigError, "dt = " + std::to_string(dt) +
                                            " exceeds the explicit stability ceiling " +
                                            std::to_string(ceiling));
  }
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
  return {cfg.t_end / static_cast<double>(steps), steps};
}

void check_snapshot_times(const SolverConfig& cfg) {
  for (double t : cfg.snapshot_times) {
    if (t < 0.0 || t > cfg.t_end * (1.0 + 1e-12)) {
      throw Error(ErrorCode::ConfigError, "snapshot time " + std::to_string(t) +
                                              " outside [0, t_end]");
    }
  }
}

State make_state(const Grid& grid, double t, std::span<const double> N, std::span<const double> A,
                 std::span<const double> D) {
  return {t, Field(grid, {N.begin(), N.end()}), Field(grid, {A.begin(), A.end()}),
          Field(grid, {D.begin(), D.end()})};
}

void require_same_grid(const Grid& grid, const Field& f, const char* name) {
  if (!(f.grid() == grid)) {
    throw Error(ErrorCode::GridMismatch, std::string(name) + " is defined on a different grid");
  }
}

// Aborts the run when a drug value escapes [0, mu/tau] by more than kAbortExcess.
void check_drug(std::span<const double> D, double ceiling, double t) {
  for (double v : D) {
    if (!std::isfinite(v) || v > ceiling + kAbortExcess || v < -kAbortExcess) {
      throw Error(ErrorCode::Instability, "drug value " + std::to_string(v) + " at t = " +
                                              std::to_string(t) + " outside [0, " +
                                              std::to_string(ceiling) + "]; dt too large?");
    }
  }
}

void check_population(std::span<const double> values, const char* name, double t) {
  for (double v : values) {
    if (!std::isfinite(v) || v < -kAbortExcess) {
      throw Error(ErrorCode::Instability, std::string(name) + " value " + std::to_string(v) +
                                              " at t = " + std::to_string(t));
    }
  }
}

// Evaluates the right-hand side into caller-owned buffers.
class RhsEvaluator {
 public:
  RhsEvaluator(const Grid& grid, const Field& chi, const ModelParams& p)
      : grid_(grid), chi_(chi.values()), p_(p), lap_(grid.node_count()) {}

  void operator()(std::span<const double> N, std::span<const double> A, std::span<const double> D,
                  std::span<double> dN, std::span<double> dA, std::span<double> dD) {
    laplacian(grid_, D, lap_);
    const double tumor_net = p_.mu_A + p_.eps_A;
    const double logistic = p_.r_A / p_.k_A;
    const double normal_kill = p_.alpha_N * p_.gamma_N;
    const double tumor_kill = p_.alpha_A * p_.gamma_A;
    for (std::size_t i = 0; i < N.size(); ++i) {
      const double n = N[i], a = A[i], d = D[i];
      dN[i] = p_.r_N - p_.mu_N * n - p_.beta_1 * n * a - normal_kill * d * n;
      dA[i] = p_.r_A * a - logistic * a * a - tumor_net * a - tumor_kill * d * a;
      dD[i] = p_.sigma * lap_[i] + p_.mu * chi_[i] - p_.gamma_A * d * a - p_.gamma_N * d * n -
              p_.tau * d;
    }
  }

 private:
  Grid grid_;
  std::span<const double> chi_;
  ModelParams p_;
  std::vector<double> lap_;
};

using Vec = std::vector<double>;

// u_out = u + c * k, elementwise.
void axpy(const Vec& u, double c, const Vec& k, Vec& out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + c * k[i];
}

}  // namespace

Derivatives rhs(const State& s, const Field& chi, const ModelParams& p) {
  const Grid& grid = s.D.grid();
  require_same_grid(grid, s.N, "N");
  require_same_grid(grid, s.A, "A");
  require_same_grid(grid, chi, "chi");
  Derivatives d{Field(grid), Field(grid), Field(grid)};
  RhsEvaluator eval(grid, chi, p);
  eval(s.N.values(), s.A.values(), s.D.values(), d.dN.values(), d.dA.values(), d.dD.values());
  return d;
}

StateTrajectory integrate_mol(const State& s0, const SolverConfig& cfg, const Field& chi,
                              const ModelParams& p, MolOptions opts) {
  const Grid& grid = s0.D.grid();
  require_same_grid(grid, s0.N, "N");
  require_same_grid(grid, s0.A, "A");
  require_same_grid(grid, chi, "chi");
  check_snapshot_times(cfg);
  const TimeGrid tg = resolve_time_grid(cfg, grid, p.sigma);
  const double ceiling = drug_ceiling(p);
  const std::size_t nodes = grid.node_count();

  StateTrajectory traj;
  traj.grid = grid;
  traj.method = cfg.method;
  traj.dt = tg.dt;
  traj.steps = tg.steps;
  traj.initial = s0;
  traj.initial.t = 0.0;

  std::vector<std::size_t> snap_steps;
  for (double t : cfg.snapshot_times) snap_steps.push_back(tg.nearest_step(t));
  const bool want_lag = cfg.stationarity_lag > 0.0 && cfg.stationarity_lag <= cfg.t_end;
  const std::size_t lag_step = want_lag ? tg.nearest_step(cfg.t_end - cfg.stationarity_lag) : 0;
  if (opts.history_stride > 0) traj.history.emplace(grid);

  Vec N(s0.N.values().begin(), s0.N.values().end());
  Vec A(s0.A.values().begin(), s0.A.values().end());
  Vec D(s0.D.values().begin(), s0.D.values().end());
  Vec k1N(nodes), k1A(nodes), k1D(nodes), k2N(nodes), k2A(nodes), k2D(nodes);
  Vec k3N(nodes), k3A(nodes), k3D(nodes), k4N(nodes), k4A(nodes), k4D(nodes);
  Vec tN(nodes), tA(nodes), tD(nodes);
  RhsEvaluator f(grid, chi, p);

  auto record = [&](std::size_t step) {
    const double t = static_cast<double>(step) * tg.dt;
    traj.extrema.observe_normal(t, N);
    traj.extrema.observe_tumor(t, A);
    traj.extrema.observe_drug(t, D);
    for (std::size_t s = 0; s < snap_steps.size(); ++s) {
      if (snap_steps[s] == step) traj.snapshots.push_back({cfg.snapshot_times[s], make_state(grid, t, N, A, D)});
    }
    if (want_lag && step == lag_step) traj.lagged = make_state(grid, t, N, A, D);
    if (traj.history && (step % opts.history_stride == 0 || step == tg.steps)) {
      traj.history->append(t, Field(grid, D));
    }
  };
  record(0);

  const double dt = tg.dt;
  for (std::size_t step = 0; step < tg.steps; ++step) {
    if (cfg.method == Method::explicit_euler) {
      f(N, A, D, k1N, k1A, k1D);
      axpy(N, dt, k1N, N);
      axpy(A, dt, k1A, A);
      axpy(D, dt, k1D, D);
    } else {
      f(N, A, D, k1N, k1A, k1D);
      axpy(N, 0.5 * dt, k1N, tN);
      axpy(A, 0.5 * dt, k1A, tA);
      axpy(D, 0.5 * dt, k1D, tD);
      f(tN, tA, tD, k2N, k2A, k2D);
      axpy(N, 0.5 * dt, k2N, tN);
      axpy(A, 0.5 * dt, k2A, tA);
      axpy(D, 0.5 * dt, k2D, tD);
      f(tN, tA, tD, k3N, k3A, k3D);
      axpy(N, dt, k3N, tN);
      axpy(A, dt, k3A, tA);
      axpy(D, dt, k3D, tD);
      f(tN, tA, tD, k4N, k4A, k4D);
      for (std::size_t i = 0; i < nodes; ++i) {
        N[i] += dt / 6.0 * (k1N[i] + 2.0 * k2N[i] + 2.0 * k3N[i] + k4N[i]);
        A[i] += dt / 6.0 * (k1A[i] + 2.0 * k2A[i] + 2.0 * k3A[i] + k4A[i]);
        D[i] += dt / 6.0 * (k1D[i] + 2.0 * k2D[i] + 2.0 * k3D[i] + k4D[i]);
      }
    }
    const double t = static_cast<double>(step + 1) * dt;
    check_drug(D, ceiling, t);
    check_population(N, "N", t);
    check_population(A, "A", t);
    record(step + 1);
  }
  traj.final_state = make_state(grid, cfg.t_end, N, A, D);
  return traj;
}

namespace {

// A drug trajectory stored at a subset of solver steps and read back by
// linear interpolation.
class StampedTrajectory {
 public:
  StampedTrajectory(std::size_t steps, std::size_t stride, std::size_t nodes)
      : stride_(stride), nodes_(nodes) {
    for (std::size_t k = 0; k < steps; k += stride) stamp_steps_.push_back(k);
    stamp_steps_.push_back(steps);
    values_.assign(stamp_steps_.size() * nodes, 0.0);
  }

  std::size_t stamp_count() const { return stamp_steps_.size(); }
  std::size_t stamp_step(std::size_t s) const { return stamp_steps_[s]; }

  std::span<double> stamp(std::size_t s) { return {values_.data() + s * nodes_, nodes_}; }
  std::span<const double> stamp(std::size_t s) const { return {values_.data() + s * nodes_, nodes_}; }

  /// Stamp index if `step` is stored, otherwise npos.
  std::size_t stamp_at(std::size_t step) const {
    const std::size_t s = step / stride_;
    if (s < stamp_steps_.size() && stamp_steps_[s] == step) return s;
    if (step == stamp_steps_.back()) return stamp_steps_.size() - 1;
    return npos;
  }

  void interpolate(std::size_t step, std::span<double> out) const {
    const std::size_t seg = std::min(step / stride_, stamp_steps_.size() - 2);
    const auto s0 = static_cast<double>(stamp_steps_[seg]);
    const auto s1 = static_cast<double>(stamp_steps_[seg + 1]);
    const double w = (static_cast<double>(step) - s0) / (s1 - s0);
    const auto a = stamp(seg);
    const auto b = stamp(seg + 1);
    for (std::size_t i = 0; i < nodes_; ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
  }

  double max_abs_difference(const StampedTrajectory& other) const {
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) m = std::max(m, std::abs(values_[i] - other.values_[i]));
    return m;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t stride_;
  std::size_t nodes_;
  std::vector<std::size_t> stamp_steps_;
  std::vector<double> values_;
};

constexpr double kIterateBudget = 1.2e7;

}  // namespace

StateTrajectory picard_solve(const Field& D0, const Field& N0, const Field& A0,
                             const SolverConfig& cfg, const Field& chi, const ModelParams& p) {
  const Grid& grid = D0.grid();
  require_same_grid(grid, N0, "N0");
  require_same_grid(grid, A0, "A0");
  require_same_grid(grid, chi, "chi");
  check_snapshot_times(cfg);
  const double ceiling = drug_ceiling(p);
  if (D0.min() < 0.0 || D0.max() > ceiling) {
    throw Error(ErrorCode::ValidationError, "D0 must lie in [0, mu/tau]");
  }
  if (cfg.picard.max_iter < 1 || !(cfg.picard.tol > 0.0)) {
    throw Error(ErrorCode::ConfigError, "picard needs max_iter >= 1 and tol > 0");
  }
  const TimeGrid tg = resolve_time_grid(cfg, grid, p.sigma);
  const std::size_t nodes = grid.node_count();
  std::size_t stride = cfg.picard.history_stride;
  if (stride == 0) {
    const double total = static_cast<double>(tg.steps + 1) * static_cast<double>(nodes);
    stride = static_cast<std::size_t>(std::max(1.0, std::ceil(total / kIterateBudget)));
  }
  const double dt = tg.dt;

  std::vector<std::size_t> snap_steps;
  for (double t : cfg.snapshot_times) snap_steps.push_back(tg.nearest_step(t));
  const bool want_lag = cfg.stationarity_lag > 0.0 && cfg.stationarity_lag <= cfg.t_end;
  const std::size_t lag_step = want_lag ? tg.nearest_step(cfg.t_end - cfg.stationarity_lag) : 0;

  StampedTrajectory current(tg.steps, stride, nodes);
  for (std::size_t s = 0; s < current.stamp_count(); ++s) {
    auto v = current.stamp(s);
    if (cfg.picard.initial_guess) {
      std::fill(v.begin(), v.end(), *cfg.picard.initial_guess);
    } else {
      std::copy(D0.values().begin(), D0.values().end(), v.begin());
    }
  }
  StampedTrajectory next = current;

  // D at snapshot steps and extrema from the latest sweep.
  std::vector<Vec> snap_drug(snap_steps.size());
  Vec lag_drug;
  TrajectoryExtrema drug_extrema;

  Vec phi(nodes), D(nodes), rate0(nodes), rate1(nodes), rate_mid(nodes), lap(nodes);
  Vec k1(nodes), k2(nodes), k3(nodes), k4(nodes), tmp(nodes);
  const double source = p.mu;
  auto drug_rhs = [&](const Vec& u, const Vec& rate, Vec& out) {
    laplacian(grid, u, lap);
    for (std::size_t i = 0; i < nodes; ++i) {
      out[i] = p.sigma * lap[i] + source * chi[i] - rate[i] * u[i];
    }
  };
  auto absorption = [&](const KernelAccumulator& acc, Vec& rate) {
    const auto lam = acc.tumor();
    const auto theta = acc.normal();
    for (std::size_t i = 0; i < nodes; ++i) rate[i] = p.gamma_A * lam[i] + p.gamma_N * theta[i] + p.tau;
  };

  // One application of the fixed-point map: `current` -> `next`.
  auto sweep = [&] {
    drug_extrema = {};
    current.interpolate(0, phi);
    KernelAccumulator acc(p, N0.values(), A0.values(), phi);
    absorption(acc, rate0);
    std::copy(D0.values().begin(), D0.values().end(), D.begin());
    auto store = [&](std::size_t step) {
      const double t = static_cast<double>(step) * dt;
      drug_extrema.observe_drug(t, D);
      for (std::size_t s = 0; s < snap_steps.size(); ++s) {
        if (snap_steps[s] == step) snap_drug[s] = D;
      }
      if (want_lag && step == lag_step) lag_drug = D;
      if (const std::size_t s = next.stamp_at(step); s != StampedTrajectory::npos) {
        std::copy(D.begin(), D.end(), next.stamp(s).begin());
      }
    };
    store(0);
    for (std::size_t step = 0; step < tg.steps; ++step) {
      current.interpolate(step + 1, phi);
      acc.advance(dt, phi);
      absorption(acc, rate1);
      if (cfg.method == Method::explicit_euler) {
        drug_rhs(D, rate0, k1);
        axpy(D, dt, k1, D);
      } else {
        for (std::size_t i = 0; i < nodes; ++i) rate_mid[i] = 0.5 * (rate0[i] + rate1[i]);
        drug_rhs(D, rate0, k1);
        axpy(D, 0.5 * dt, k1, tmp);
        drug_rhs(tmp, rate_mid, k2);
        axpy(D, 0.5 * dt, k2, tmp);
        drug_rhs(tmp, rate_mid, k3);
        axpy(D, dt, k3, tmp);
        drug_rhs(tmp, rate1, k4);
        for (std::size_t i = 0; i < nodes; ++i) {
          D[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
      }
      std::swap(rate0, rate1);
      check_drug(D, ceiling, static_cast<double>(step + 1) * dt);
      store(step + 1);
    }
  };

  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  while (iterations < cfg.picard.max_iter) {
    sweep();
    ++iterations;
    residual = next.max_abs_difference(current);
    std::swap(current, next);
    if (residual <= cfg.picard.tol) break;
  }
  if (residual > cfg.picard.tol) {
    throw Error(ErrorCode::NoConvergence, "fixed-point iteration stopped after " +
                                              std::to_string(iterations) + " sweeps with residual " +
                                              std::to_string(residual));
  }

  // N and A are the operators applied to the converged drug trajectory.
  StateTrajectory traj;
  traj.grid = grid;
  traj.method = cfg.method;
  traj.dt = dt;
  traj.steps = tg.steps;
  traj.picard_iterations = iterations;
  traj.picard_residual = residual;
  traj.initial = {0.0, N0, A0, D0};
  traj.extrema = drug_extrema;

  current.interpolate(0, phi);
  KernelAccumulator acc(p, N0.values(), A0.values(), phi);
  auto collect = [&](std::size_t step) {
    const double t = static_cast<double>(step) * dt;
    traj.extrema.observe_normal(t, acc.normal());
    traj.extrema.observe_tumor(t, acc.tumor());
    for (std::size_t s = 0; s < snap_steps.size(); ++s) {
      if (snap_steps[s] == step) {
        traj.snapshots.push_back({cfg.snapshot_times[s], make_state(grid, t, acc.normal(), acc.tumor(), snap_drug[s])});
      }
    }
    if (want_lag && step == lag_step) traj.lagged = make_state(grid, t, acc.normal(), acc.tumor(), lag_drug);
  };
  collect(0);
  for (std::size_t step = 0; step < tg.steps; ++step) {
    current.interpolate(step + 1, phi);
    acc.advance(dt, phi);
    check_population(acc.normal(), "N", acc.time());
    check_population(acc.tumor(), "A", acc.time());
    collect(step + 1);
  }
  traj.final_state = make_state(grid, cfg.t_end, acc.normal(), acc.tumor(), current.stamp(current.stamp_count() - 1));
  return traj;
}

}  // namespace tumorsim
