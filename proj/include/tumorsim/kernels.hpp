#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tumorsim/domain.hpp"
#include "tumorsim/params.hpp"

namespace tumorsim {

/// Time-stamped drug fields together with the running per-node integrals
/// of |D| (trapezoid rule between stamps).
class DrugHistory {
 public:
  explicit DrugHistory(const Grid& grid);

  /// The first stamp must be t = 0; later stamps must increase strictly.
  void append(double t, const Field& drug);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double time(std::size_t k) const { return times_.at(k); }
  double last_time() const;
  const Field& field(std::size_t k) const { return fields_.at(k); }
  /// Integral of |D| from 0 to stamp k at every node.
  std::span<const double> abs_integral(std::size_t k) const { return abs_integrals_.at(k); }

 private:
  Grid grid_;
  std::vector<double> times_;
  std::vector<Field> fields_;
  std::vector<std::vector<double>> abs_integrals_;
};

/// Marches the closed-form tumor operator Lambda and normal-cell operator
/// Theta along a drug trajectory phi, one interval at a time.
///
/// Memory is O(nodes): only running integrals are kept. The exponential
/// integrals are evaluated in scaled form, treating each exponent as linear
/// on an interval, so e^{mu_N t} and friends never overflow; the integral
/// of Lambda uses the endpoint-corrected trapezoid rule with Lambda' taken
/// from the logistic equation Lambda satisfies.
class KernelAccumulator {
 public:
  KernelAccumulator(const ModelParams& p, std::span<const double> normal0,
                    std::span<const double> tumor0, std::span<const double> phi0);

  /// Advances from time() to time() + dt; phi_next is the drug field at the
  /// new time and phi is taken linear in between.
  void advance(double dt, std::span<const double> phi_next);

  double time() const noexcept { return t_; }
  std::size_t size() const noexcept { return tumor_.size(); }
  std::span<const double> tumor() const noexcept { return tumor_; }    ///< Lambda(phi)(., t)
  std::span<const double> normal() const noexcept { return normal_; }  ///< Theta(phi)(., t)
  std::span<const double> abs_integral() const noexcept { return abs_int_; }

 private:
  double lambda_ = 0.0;
  double tumor_kill_ = 0.0;   // alpha_A * gamma_A
  double normal_kill_ = 0.0;  // alpha_N * gamma_N
  double r_A_ = 0.0, k_A_ = 1.0, r_N_ = 0.0, mu_N_ = 0.0, beta_1_ = 0.0;
  double t_ = 0.0;

  std::vector<double> tumor0_, normal0_;
  std::vector<double> phi_abs_;       // |phi| at the current time
  std::vector<double> abs_int_;       // int_0^t |phi|
  std::vector<double> tumor_exp_;     // F = lambda t - alpha_A gamma_A int |phi|
  std::vector<double> tumor_peak_;    // running max of F (and 0)
  std::vector<double> tumor_scaled_;  // e^{-peak} int_0^t e^{F}
  std::vector<double> tumor_;         // Lambda
  std::vector<double> tumor_int_;     // int_0^t Lambda
  std::vector<double> normal_exp_;    // G = mu_N t + alpha_N gamma_N int|phi| + beta_1 int Lambda
  std::vector<double> normal_ratio_;  // int_0^t e^{G(s) - G(t)} ds
  std::vector<double> normal_;        // Theta
};

/// Lambda(phi)(., t). Throws Error(HistoryTooShort) if t lies outside the
/// stored stamps and Error(NegativeInput) if A0 has a negative entry. Times
/// between stamps use a partial final interval with phi interpolated.
Field lambda_op(const DrugHistory& hist, const Field& A0, const ModelParams& p, double t);

/// Theta(phi)(., t); errors as lambda_op (N0 must also be nonnegative).
Field theta_op(const DrugHistory& hist, const Field& N0, const Field& A0, const ModelParams& p,
               double t);

/// Lipschitz constants of Lambda and Theta in the sup norm over [0, p.T].
struct KernelConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// C1 = |A0| C_l aA gA T + (2/k_A)|A0|^2 r_A C_l^2 aA gA T^2 and the four
/// term C2 sum, with C_l = max(1, e^{lambda T}). C2 overflows to +inf for
/// long horizons, where it carries no information.
KernelConstants lipschitz_constants(const ModelParams& p, double A0_sup, double N0_sup,
                                    double phi_sup);

struct Envelope {
  double N_max = 0.0;
  double A_max = 0.0;
};

/// N <= |N0| + r_N T and A <= C_lambda |A0| over [0, p.T].
Envelope bound_envelope(const ModelParams& p, double N0_sup, double A0_sup);

}  // namespace tumorsim
