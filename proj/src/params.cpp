#include "tumorsim/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "tumorsim/error.hpp"

namespace tumorsim {

ModelParams validate_params(ModelParams p) {
  const std::pair<const char*, double> positive[] = {
      {"tau", p.tau}, {"k_A", p.k_A}, {"sigma", p.sigma}, {"T", p.T}};
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::NonPositive, std::string(name) + " must be positive, got " +
                                              std::to_string(value));
    }
  }
  const std::pair<const char*, double> rates[] = {
      {"r_N", p.r_N},         {"mu_N", p.mu_N},       {"beta_1", p.beta_1},
      {"r_A", p.r_A},         {"mu_A", p.mu_A},       {"eps_A", p.eps_A},
      {"alpha_N", p.alpha_N}, {"alpha_A", p.alpha_A}, {"gamma_N", p.gamma_N},
      {"gamma_A", p.gamma_A}, {"mu", p.mu}};
  for (const auto& [name, value] : rates) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::NegativeRate, std::string(name) + " must be nonnegative, got " +
                                               std::to_string(value));
    }
  }
  p.lambda = p.r_A - (p.mu_A + p.eps_A);
  p.c_lambda = std::max(1.0, std::exp(p.lambda * p.T));
  return p;
}

Equilibrium equilibrium_no_treatment(const ModelParams& p) {
  if (!(p.r_A > 0.0)) {
    throw Error(ErrorCode::NonPositive, "tumor equilibrium needs r_A > 0");
  }
  const double a2 = std::max(0.0, (p.r_A - p.mu_A - p.eps_A) / p.r_A * p.k_A);
  const double denom = p.mu_N + p.beta_1 * a2;
  if (denom == 0.0) {
    throw Error(ErrorCode::DegenerateDenominator, "mu_N + beta_1 * A2 vanishes");
  }
  return {p.r_N / denom, a2};
}

double drug_ceiling(const ModelParams& p) {
  if (!(p.tau > 0.0)) {
    throw Error(ErrorCode::NonPositive, "drug ceiling needs tau > 0");
  }
  return p.mu / p.tau;
}

}  // namespace tumorsim
