#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "tumorsim/verify.hpp"

namespace ts = tumorsim;

namespace {

ts::ModelParams rates(double T = 25.0) {
  ts::ModelParams p;
  p.r_N = 1.0;
  p.mu_N = 1.0;
  p.r_A = 1.0;
  p.k_A = 1.0;
  p.beta_1 = 1.5;
  p.mu_A = 0.05;
  p.eps_A = 0.05;
  p.tau = 0.9;
  p.gamma_N = 0.1;
  p.alpha_N = 1.0;
  p.gamma_A = 1.0;
  p.alpha_A = 10.0;
  p.mu = 3.0;
  p.sigma = 0.1;
  p.T = T;
  return ts::validate_params(p);
}

ts::StateTrajectory still_trajectory(const ts::Grid& g, double n, double a, double d) {
  ts::StateTrajectory traj;
  traj.grid = g;
  traj.initial = {0.0, ts::Field(g, n), ts::Field(g, a), ts::Field(g, d)};
  traj.final_state = traj.initial;
  traj.final_state.t = 1.0;
  traj.snapshots.push_back({0.0, traj.initial});
  traj.snapshots.push_back({1.0, traj.final_state});
  return traj;
}

ts::DrugHistory constant_history(const ts::Grid& g, double T, std::size_t intervals, double value) {
  ts::DrugHistory h(g);
  for (std::size_t k = 0; k <= intervals; ++k)
    h.append(T * static_cast<double>(k) / static_cast<double>(intervals), ts::Field(g, value));
  return h;
}

}  // namespace

TEST(AuditReport, LookupByName) {
  ts::AuditReport r;
  r.checks.push_back({"a", true, 1.0, 0, 0.0, {}});
  r.checks.push_back({"b", false, -1.0, 0, 0.0, {}});
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.check("b").worst_margin, -1.0);
  EXPECT_THROW(r.check("c"), std::out_of_range);
}

TEST(AuditBounds, ZeroTrajectoryMarginsAreTheBounds) {
  const ts::Grid g = ts::build_grid(1, 1.0, 4);
  const auto p = rates(1.0);
  const auto r = ts::audit_bounds(still_trajectory(g, 0.0, 0.0, 0.0), p);
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.checks.size(), 6u);
  EXPECT_EQ(r.check("N_nonnegative").worst_margin, 0.0);
  EXPECT_EQ(r.check("A_nonnegative").worst_margin, 0.0);
  EXPECT_EQ(r.check("D_nonnegative").worst_margin, 0.0);
  EXPECT_DOUBLE_EQ(r.check("D_ceiling").worst_margin, 3.0 / 0.9);
  EXPECT_DOUBLE_EQ(r.check("N_envelope").worst_margin, 1.0);  // |N0| + r_N T
  EXPECT_EQ(r.check("A_envelope").worst_margin, 0.0);         // C_lambda |A0|
}

TEST(AuditBounds, DrugAboveCeilingAtOneNode) {
  const ts::Grid g = ts::build_grid(1, 1.0, 4);
  const auto p = rates(1.0);
  auto traj = still_trajectory(g, 0.4, 0.9, 1.0);
  traj.snapshots[1].state.D[3] = ts::drug_ceiling(p) + 0.1;
  const auto r = ts::audit_bounds(traj, p);
  EXPECT_FALSE(r.passed());
  const auto& c = r.check("D_ceiling");
  EXPECT_FALSE(c.passed);
  EXPECT_NEAR(c.worst_margin, -0.1, 1e-14);
  EXPECT_EQ(c.node, 3u);
  EXPECT_EQ(c.t, 1.0);
  EXPECT_TRUE(r.check("D_nonnegative").passed);
}

TEST(AuditBounds, ToleranceBand) {
  const ts::Grid g = ts::build_grid(1, 1.0, 4);
  const auto p = rates(1.0);
  auto traj = still_trajectory(g, 0.4, 0.9, 1.0);
  traj.final_state.A[0] = -5e-13;
  EXPECT_TRUE(ts::audit_bounds(traj, p).check("A_nonnegative").passed);
  traj.final_state.A[0] = -2e-12;
  EXPECT_FALSE(ts::audit_bounds(traj, p).check("A_nonnegative").passed);
}

TEST(AuditBounds, UsesStepExtrema) {
  const ts::Grid g = ts::build_grid(1, 1.0, 4);
  const auto p = rates(1.0);
  auto traj = still_trajectory(g, 0.4, 0.9, 1.0);
  traj.extrema.observe_normal(0.5, std::vector<double>{0.4, -1e-6, 0.4, 0.4, 0.4});
  const auto& c = ts::audit_bounds(traj, p).check("N_nonnegative");
  EXPECT_FALSE(c.passed);
  EXPECT_EQ(c.node, 1u);
  EXPECT_EQ(c.t, 0.5);
}

TEST(AuditBounds, MethodOfLinesRunPasses) {
  const ts::Grid g = ts::build_grid(1, 1.0, 20);
  const auto p = rates(5.0);
  const ts::State s0{0.0, ts::Field(g, 1 / 2.35), ts::Field(g, 0.9), ts::Field(g)};
  ts::SolverConfig cfg;
  cfg.t_end = 5.0;
  cfg.snapshot_times = {0, 1, 5};
  const auto traj = ts::integrate_mol(s0, cfg, ts::coverage_fraction(ts::Region::interval(0, 0.1), g), p);
  EXPECT_TRUE(ts::audit_bounds(traj, p).passed());
}

TEST(OracleKernels, ZeroDrugPasses) {
  const ts::Grid g = ts::build_grid(1, 1.0, 5);
  const auto p = rates(5.0);
  const auto r = ts::oracle_kernels(constant_history(g, 5.0, 5000, 0.0), ts::Field(g, 0.4), ts::Field(g, 0.2), p, 1e-6);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.checks.size(), 2u);
}

TEST(OracleKernels, RandomHistoryPasses) {
  const ts::Grid g = ts::build_grid(1, 1.0, 10);
  const auto p = rates(5.0);
  const auto hist = ts::random_drug_history(g, 5.0, 5000, ts::drug_ceiling(p), 8, 99);
  EXPECT_TRUE(ts::oracle_kernels(hist, ts::Field(g, 0.5), ts::Field(g, 0.7), p, 1e-6).passed());
}

TEST(OracleKernels, CoarseStampsFail) {
  const ts::Grid g = ts::build_grid(1, 1.0, 10);
  const auto p = rates(5.0);
  const auto hist = ts::random_drug_history(g, 5.0, 10, ts::drug_ceiling(p), 8, 99);
  EXPECT_FALSE(ts::oracle_kernels(hist, ts::Field(g, 0.5), ts::Field(g, 0.7), p, 1e-6).passed());
}

TEST(RandomDrugHistory, BoundedAndSeeded) {
  const ts::Grid g = ts::build_grid(1, 1.0, 6);
  const auto a = ts::random_drug_history(g, 2.0, 100, 3.0, 5, 4);
  const auto b = ts::random_drug_history(g, 2.0, 100, 3.0, 5, 4);
  ASSERT_EQ(a.size(), 101u);
  EXPECT_DOUBLE_EQ(a.last_time(), 2.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.field(k), b.field(k));
    EXPECT_GE(a.field(k).min(), 0.0);
    EXPECT_LE(a.field(k).max(), 3.0);
  }
}

TEST(KernelOracleSuite, TwentyHistories) {
  const auto r = ts::kernel_oracle_suite(20, 5);
  EXPECT_TRUE(r.passed());
  EXPECT_LE(1e-6 - r.check("lambda_oracle").worst_margin, 1e-6);
}

TEST(RatioProfile, ConstantFunctionSaturates) {
  const std::vector<double> q(101, 0.0);
  const auto g = ts::ratio_profile(q, 0.25);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(g[k], 0.25 * static_cast<double>(k), 1e-12);
}

TEST(RatioProfile, ExponentialClosedForm) {
  const std::vector<double> q(201, 1.0);
  const auto g = ts::ratio_profile(q, 0.05);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double t = 0.05 * static_cast<double>(k);
    EXPECT_NEAR(g[k], -std::expm1(-t), 1e-14);
    if (k > 0) {
      EXPECT_LT(g[k], t);
    }
  }
}

TEST(RatioBound, ThousandSamples) {
  const auto r = ts::audit_ratio_bound(1000, 7);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.seed, 7u);
  EXPECT_GE(r.check("ratio_le_T").worst_margin, 0.0);
}

TEST(RatioBound, Deterministic) {
  const auto a = ts::audit_ratio_bound(50, 3), b = ts::audit_ratio_bound(50, 3);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].worst_margin, b.checks[i].worst_margin);
    EXPECT_EQ(a.checks[i].node, b.checks[i].node);
  }
}

TEST(Lipschitz, HundredPairs) {
  const auto r = ts::audit_lipschitz(rates(), 1.0, 100, 11);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.check("lambda_lipschitz").worst_margin, 0.0);
}

TEST(Lipschitz, IdenticalPairsOnly) {
  // trial 0 is always an identical pair
  const auto r = ts::audit_lipschitz(rates(), 1.0, 1, 2);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.check("lambda_lipschitz").worst_margin, 0.0);  // C1 minus a zero quotient
  EXPECT_GT(r.check("theta_lipschitz").worst_margin, 0.0);
}

TEST(Lipschitz, NoTumorKillGivesZeroQuotient) {
  ts::ModelParams raw = rates();
  raw.alpha_A = 0.0;
  raw.gamma_A = 0.0;
  const auto r = ts::audit_lipschitz(ts::validate_params(raw), 1.0, 30, 4);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.check("lambda_lipschitz").worst_margin, 0.0);  // C1 = 0 and every quotient is 0
}

// The second constant scales like T^2 while the true quotient scales like T,
// so very short horizons expose it.
TEST(Lipschitz, SecondConstantFailsOnShortHorizons) {
  const auto r = ts::audit_lipschitz(rates(), 0.01, 100, 7);
  EXPECT_TRUE(r.check("lambda_lipschitz").passed);
  EXPECT_FALSE(r.check("theta_lipschitz").passed);
}
