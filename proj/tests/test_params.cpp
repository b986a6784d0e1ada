#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tumorsim/error.hpp"
#include "tumorsim/params.hpp"

namespace ts = tumorsim;

namespace {

ts::ModelParams base_rates() {
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
  p.sigma = 0.1;
  p.T = 25.0;
  return p;
}

ts::ErrorCode code_of(const ts::ModelParams& p) {
  try {
    ts::validate_params(p);
  } catch (const ts::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ts::ErrorCode::IoError;
}

}  // namespace

TEST(ValidateParams, PaperRatesGiveLambdaPointNine) {
  const auto p = ts::validate_params(base_rates());
  EXPECT_DOUBLE_EQ(p.lambda, 0.9);
  EXPECT_DOUBLE_EQ(p.c_lambda, std::exp(0.9 * 25.0));
}

TEST(ValidateParams, AllZeroRatesAreAdmissible) {
  ts::ModelParams raw;
  raw.k_A = raw.tau = raw.sigma = raw.T = 1.0;
  const auto p = ts::validate_params(raw);
  EXPECT_EQ(p.lambda, 0.0);
  EXPECT_EQ(p.c_lambda, 1.0);
}

TEST(ValidateParams, LambdaIsExactDifference) {
  ts::ModelParams raw = base_rates();
  raw.r_A = 0.7;
  raw.mu_A = 0.3;
  raw.eps_A = 0.11;
  EXPECT_EQ(ts::validate_params(raw).lambda, 0.7 - (0.3 + 0.11));
  EXPECT_EQ(ts::validate_params(raw).c_lambda, std::exp((0.7 - (0.3 + 0.11)) * 25.0));
}

TEST(ValidateParams, NegativeLambdaKeepsCLambdaAtOne) {
  ts::ModelParams raw = base_rates();
  raw.mu_A = 2.0;
  const auto p = ts::validate_params(raw);
  EXPECT_LT(p.lambda, 0.0);
  EXPECT_EQ(p.c_lambda, 1.0);
}

TEST(ValidateParams, NonPositiveStructuralConstants) {
  for (auto field : {&ts::ModelParams::tau, &ts::ModelParams::k_A, &ts::ModelParams::sigma, &ts::ModelParams::T}) {
    ts::ModelParams p = base_rates();
    p.*field = 0.0;
    EXPECT_EQ(code_of(p), ts::ErrorCode::NonPositive);
    p.*field = -1.0;
    EXPECT_EQ(code_of(p), ts::ErrorCode::NonPositive);
  }
}

TEST(ValidateParams, NegativeRatesRejected) {
  for (auto field : {&ts::ModelParams::r_N, &ts::ModelParams::mu_N, &ts::ModelParams::beta_1, &ts::ModelParams::r_A,
                     &ts::ModelParams::mu_A, &ts::ModelParams::eps_A, &ts::ModelParams::alpha_N,
                     &ts::ModelParams::alpha_A, &ts::ModelParams::gamma_N, &ts::ModelParams::gamma_A,
                     &ts::ModelParams::mu}) {
    ts::ModelParams p = base_rates();
    p.*field = -1e-9;
    EXPECT_EQ(code_of(p), ts::ErrorCode::NegativeRate);
  }
}

TEST(Equilibrium, PaperRates) {
  const auto eq = ts::equilibrium_no_treatment(ts::validate_params(base_rates()));
  EXPECT_NEAR(eq.A2, 0.9, 1e-15);
  EXPECT_NEAR(eq.N2, 1.0 / 2.35, 1e-15);
  EXPECT_NEAR(eq.N2, 0.4255319148936170, 1e-15);
}

TEST(Equilibrium, ZeroNetGrowthKillsTumor) {
  ts::ModelParams raw = base_rates();
  raw.mu_A = 0.5;
  raw.eps_A = 0.5;
  raw.r_N = 2.0;
  raw.mu_N = 4.0;
  const auto eq = ts::equilibrium_no_treatment(ts::validate_params(raw));
  EXPECT_EQ(eq.A2, 0.0);
  EXPECT_DOUBLE_EQ(eq.N2, 0.5);
}

TEST(Equilibrium, NoInfluxNoNormalCells) {
  ts::ModelParams raw = base_rates();
  raw.r_N = 0.0;
  const auto eq = ts::equilibrium_no_treatment(ts::validate_params(raw));
  EXPECT_EQ(eq.N2, 0.0);
  EXPECT_NEAR(eq.A2, 0.9, 1e-15);
}

TEST(Equilibrium, NegativeLambdaClampsAtZero) {
  ts::ModelParams raw = base_rates();
  raw.mu_A = 3.0;
  EXPECT_EQ(ts::equilibrium_no_treatment(ts::validate_params(raw)).A2, 0.0);
}

TEST(Equilibrium, DegenerateDenominator) {
  ts::ModelParams raw = base_rates();
  raw.mu_N = 0.0;
  raw.beta_1 = 0.0;
  try {
    ts::equilibrium_no_treatment(ts::validate_params(raw));
    FAIL();
  } catch (const ts::Error& e) {
    EXPECT_EQ(e.code(), ts::ErrorCode::DegenerateDenominator);
  }
}

TEST(Equilibrium, RequiresPositiveGrowthRate) {
  ts::ModelParams raw = base_rates();
  raw.r_A = 0.0;
  EXPECT_THROW(ts::equilibrium_no_treatment(ts::validate_params(raw)), ts::Error);
}

// The untreated ODE right-hand side vanishes at the equilibrium.
TEST(Equilibrium, StationaryForRandomRates) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    ts::ModelParams raw = base_rates();
    raw.r_N = u(rng);
    raw.mu_N = u(rng);
    raw.beta_1 = u(rng);
    raw.r_A = u(rng);
    raw.k_A = u(rng);
    raw.mu_A = 0.2 * u(rng);
    raw.eps_A = 0.2 * u(rng);
    const auto p = ts::validate_params(raw);
    const auto eq = ts::equilibrium_no_treatment(p);
    const double dN = p.r_N - p.mu_N * eq.N2 - p.beta_1 * eq.N2 * eq.A2;
    const double dA = p.r_A * eq.A2 * (1 - eq.A2 / p.k_A) - (p.mu_A + p.eps_A) * eq.A2;
    EXPECT_LE(std::abs(dN), 1e-12);
    EXPECT_LE(std::abs(dA), 1e-12);
    EXPECT_GE(eq.A2, 0.0);
    EXPECT_GE(eq.N2, 0.0);
  }
}

TEST(DrugCeiling, Examples) {
  ts::ModelParams p = base_rates();
  p.mu = 3.0;
  EXPECT_NEAR(ts::drug_ceiling(ts::validate_params(p)), 3.0 / 0.9, 1e-15);
  p.mu = 6.0;
  EXPECT_NEAR(ts::drug_ceiling(ts::validate_params(p)), 6.6666666666666667, 1e-14);
  p.mu = 0.0;
  EXPECT_EQ(ts::drug_ceiling(ts::validate_params(p)), 0.0);
}

TEST(DrugCeiling, MonotoneInInfusionAndClearance) {
  ts::ModelParams p = ts::validate_params(base_rates());
  double previous = -1.0;
  for (double mu = 0.0; mu <= 10.0; mu += 0.5) {
    p.mu = mu;
    EXPECT_GT(ts::drug_ceiling(p), previous);
    previous = ts::drug_ceiling(p);
  }
  p.mu = 3.0;
  previous = INFINITY;
  for (double tau = 0.1; tau <= 5.0; tau += 0.1) {
    p.tau = tau;
    EXPECT_LT(ts::drug_ceiling(p), previous);
    previous = ts::drug_ceiling(p);
  }
}
