#include <gtest/gtest.h>

#include <cmath>

#include "tumorsim/error.hpp"
#include "tumorsim/scenarios.hpp"

namespace ts = tumorsim;

namespace {

ts::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const ts::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ts::ErrorCode::IoError;
}

// Scenario 2 geometry shortened to `T`.
ts::ScenarioSpec short_run(double T) {
  ts::ScenarioSpec s = ts::builtin_scenario(2);
  s.model.T = T;
  s.model = ts::validate_params(s.model);
  s.snapshot_times = {0.0, T / 2, T};
  return s;
}

}  // namespace

TEST(Builtin, FirstRowIsTwoDimensional) {
  const auto s = ts::builtin_scenario(1);
  EXPECT_EQ(s.dim, 2);
  EXPECT_EQ(s.model.alpha_A, 5.0);
  EXPECT_EQ(s.model.mu, 3.0);
  EXPECT_EQ(s.model.sigma, 0.1);
  EXPECT_EQ(s.omega, ts::Region::box(0.45, 0.55, 0.45, 0.55));
  EXPECT_EQ(s.snapshot_times, (std::vector<double>{0, 1, 15}));
}

TEST(Builtin, RowsThreeAndFive) {
  const auto s3 = ts::builtin_scenario(3);
  EXPECT_EQ(s3.dim, 1);
  EXPECT_EQ(s3.model.alpha_A, 10.0);
  EXPECT_EQ(s3.model.mu, 6.0);
  EXPECT_EQ(s3.model.sigma, 0.1);
  EXPECT_EQ(s3.omega, ts::Region::interval(0.0, 0.1));
  const auto s5 = ts::builtin_scenario(5);
  EXPECT_EQ(s5.model.alpha_A, 20.0);
  EXPECT_EQ(s5.model.mu, 3.0);
  EXPECT_EQ(s5.snapshot_times, (std::vector<double>{0, 3, 6, 9, 12, 15, 25}));
}

TEST(Builtin, SharedRatesAndResolution) {
  for (const auto& s : ts::builtin_scenarios()) {
    EXPECT_EQ(s.n, 50);
    EXPECT_EQ(s.length, 1.0);
    EXPECT_EQ(s.t_end(), 25.0);
    EXPECT_EQ(s.model.r_N, 1.0);
    EXPECT_EQ(s.model.beta_1, 1.5);
    EXPECT_EQ(s.model.tau, 0.9);
    EXPECT_EQ(s.model.gamma_N, 0.1);
    EXPECT_DOUBLE_EQ(s.model.lambda, 0.9);
    EXPECT_EQ(s.sampling, ts::SourceSampling::cell);
  }
  EXPECT_EQ(ts::builtin_scenario(4).model.sigma, 0.2);
}

TEST(Builtin, UnknownIds) {
  EXPECT_EQ(code_of([] { ts::builtin_scenario(0); }), ts::ErrorCode::UnknownScenario);
  EXPECT_EQ(code_of([] { ts::builtin_scenario(6); }), ts::ErrorCode::UnknownScenario);
}

TEST(Builtin, RowsTwoAndThreeDifferOnlyInInfusion) {
  auto s = ts::builtin_scenario(2);
  EXPECT_FALSE(ts::same_experiment(s, ts::builtin_scenario(3)));
  s.model.mu = 6.0;
  EXPECT_TRUE(ts::same_experiment(s, ts::builtin_scenario(3)));
}

TEST(InitialState, EquilibriumEverywhere) {
  const auto s0 = ts::initial_state(ts::builtin_scenario(1));
  EXPECT_EQ(s0.N.size(), 2601u);
  EXPECT_EQ(s0.N.min(), s0.N.max());
  EXPECT_NEAR(s0.N[0], 0.4255319148936170, 1e-15);
  EXPECT_NEAR(s0.A[100], 0.9, 1e-15);
  EXPECT_EQ(s0.D.max_abs(), 0.0);
}

TEST(SourceField, SamplingModes) {
  auto s = ts::builtin_scenario(2);
  const ts::Field cell = ts::source_field(s);
  EXPECT_NEAR(cell[5], 0.5, 1e-12);
  s.sampling = ts::SourceSampling::node;
  const ts::Field node = ts::source_field(s);
  EXPECT_EQ(node[5], 1.0);
  EXPECT_EQ(ts::parse_sampling("node"), ts::SourceSampling::node);
  EXPECT_EQ(code_of([] { ts::parse_sampling("smooth"); }), ts::ErrorCode::ConfigError);
}

TEST(ValidateSpec, Errors) {
  auto s = ts::builtin_scenario(2);
  s.omega = ts::Region::interval(0.5, 1.5);
  EXPECT_EQ(code_of([&] { ts::validate_spec(s); }), ts::ErrorCode::ConfigError);
  s = ts::builtin_scenario(2);
  s.model.tau = 0.0;
  EXPECT_EQ(code_of([&] { ts::validate_spec(s); }), ts::ErrorCode::NonPositive);
  s = ts::builtin_scenario(2);
  s.snapshot_times.push_back(30.0);
  EXPECT_EQ(code_of([&] { ts::validate_spec(s); }), ts::ErrorCode::ValidationError);
  s = ts::builtin_scenario(2);
  s.n = 1;
  EXPECT_EQ(code_of([&] { ts::validate_spec(s); }), ts::ErrorCode::BadResolution);
}

TEST(DefaultSolverConfig, FollowsSpec) {
  const auto s = ts::builtin_scenario(4);
  const auto cfg = ts::default_solver_config(s);
  EXPECT_EQ(cfg.method, ts::Method::rk4);
  EXPECT_EQ(cfg.dt, 0.0);
  EXPECT_EQ(cfg.t_end, 25.0);
  EXPECT_EQ(cfg.snapshot_times, s.snapshot_times);
}

TEST(Classify, ZeroTumorIsExtinction) {
  const ts::Grid g = ts::build_grid(1, 1.0, 4);
  ts::StateTrajectory traj;
  traj.final_state = {1.0, ts::Field(g, 0.5), ts::Field(g), ts::Field(g)};
  traj.lagged = traj.final_state;
  const auto c = ts::classify_outcome(traj);
  EXPECT_EQ(c.outcome, ts::Outcome::extinction);
  EXPECT_TRUE(c.near_stationary);
  EXPECT_EQ(c.min_N_final, 0.5);
}

TEST(Classify, ThresholdsAndStationarity) {
  const ts::Grid g = ts::build_grid(1, 1.0, 4);
  ts::StateTrajectory traj;
  traj.final_state = {1.0, ts::Field(g, 0.5), ts::Field(g, 0.0), ts::Field(g)};
  traj.final_state.A[2] = 1e-3;
  EXPECT_EQ(ts::classify_outcome(traj).outcome, ts::Outcome::persistence);
  EXPECT_FALSE(ts::classify_outcome(traj).near_stationary);
  traj.final_state.A[2] = 0.99e-3;
  EXPECT_EQ(ts::classify_outcome(traj).outcome, ts::Outcome::extinction);
  traj.lagged = traj.final_state;
  traj.lagged->A[1] = 2e-4;
  EXPECT_FALSE(ts::classify_outcome(traj).near_stationary);
  EXPECT_DOUBLE_EQ(ts::classify_outcome(traj).stationary_gap, 2e-4);
  EXPECT_EQ(ts::to_string(ts::Outcome::persistence), "persistence");
}

TEST(RunScenario, SecondPersistsThirdGoesExtinct) {
  const auto s2 = ts::builtin_scenario(2), s3 = ts::builtin_scenario(3);
  const auto r2 = ts::run_scenario(s2, ts::default_solver_config(s2));
  const auto r3 = ts::run_scenario(s3, ts::default_solver_config(s3));
  EXPECT_EQ(r2.report.outcome(), ts::Outcome::persistence);
  EXPECT_GT(r2.report.classification.max_A_final, 0.1);
  EXPECT_EQ(r3.report.outcome(), ts::Outcome::extinction);
  // normal cells recover well above the treated-equilibrium level everywhere
  EXPECT_GT(r3.report.classification.min_N_final, 0.8);
  EXPECT_TRUE(r2.report.passed());
  EXPECT_TRUE(r3.report.passed());
  EXPECT_EQ(r2.trajectory.snapshots.size(), 7u);
}

TEST(RunScenario, NoInfusionKeepsEquilibrium) {
  auto s = ts::builtin_scenario(2);
  s.model.mu = 0.0;
  const auto run = ts::run_scenario(s, ts::default_solver_config(s));
  EXPECT_EQ(run.report.outcome(), ts::Outcome::persistence);
  EXPECT_NEAR(run.trajectory.final_state.A.min(), 0.9, 1e-10);
  EXPECT_NEAR(run.trajectory.final_state.A.max(), 0.9, 1e-10);
  EXPECT_TRUE(run.report.classification.near_stationary);
}

TEST(RunScenario, PicardCrossCheck) {
  const auto s = short_run(3.0);
  ts::RunOptions opts;
  opts.picard_check = true;
  const auto run = ts::run_scenario(s, ts::default_solver_config(s), opts);
  ASSERT_TRUE(run.picard.has_value());
  ASSERT_TRUE(run.report.picard_gap.has_value());
  EXPECT_LE(*run.report.picard_gap, 1e-3);
  EXPECT_TRUE(run.report.passed());
  EXPECT_GT(run.report.picard_iterations, 1);
  EXPECT_EQ(ts::snapshot_gap(run.trajectory, run.trajectory), 0.0);
}

TEST(RunScenario, AuditUsesRunHorizon) {
  const auto s = short_run(2.0);
  const auto run = ts::run_scenario(s, ts::default_solver_config(s));
  EXPECT_TRUE(run.report.passed());
  EXPECT_NEAR(run.report.audit.check("N_envelope").worst_margin,
              1 / 2.35 + 2.0 - run.trajectory.extrema.max_N.value, 1e-12);
}

TEST(RunScenario, CentredSourceGivesSymmetricSolution) {
  const auto s = ts::builtin_scenario(1);
  const auto run = ts::run_scenario(s, ts::default_solver_config(s));
  const ts::Grid& g = run.trajectory.grid;
  const std::size_t m = g.nodes_per_side();
  double asym = 0.0;
  for (const auto& snap : run.trajectory.snapshots) {
    for (const ts::Field* f : {&snap.state.N, &snap.state.A, &snap.state.D}) {
      for (std::size_t iy = 0; iy < m; ++iy) {
        for (std::size_t ix = 0; ix < m; ++ix) {
          const double v = (*f)[iy * m + ix];
          asym = std::max({asym, std::abs(v - (*f)[ix * m + iy]), std::abs(v - (*f)[(m - 1 - iy) * m + (m - 1 - ix)]),
                           std::abs(v - (*f)[iy * m + (m - 1 - ix)])});
        }
      }
    }
  }
  EXPECT_LE(asym, 1e-8);
  EXPECT_EQ(run.report.outcome(), ts::Outcome::persistence);
}
