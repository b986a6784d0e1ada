#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tumorsim/domain.hpp"
#include "tumorsim/kernels.hpp"
#include "tumorsim/params.hpp"
#include "tumorsim/solver.hpp"

namespace tumorsim {

/// One audited inequality. `worst_margin` is the signed distance to the
/// bound at the worst case found (negative means violated); `node` and `t`
/// locate it.
struct CheckResult {
  std::string name;
  bool passed = true;
  double worst_margin = 0.0;
  std::size_t node = 0;
  double t = 0.0;
  std::string detail;
};

struct AuditReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// Throws std::out_of_range for an unknown check name.
  const CheckResult& check(const std::string& name) const;
};

struct BoundTolerances {
  double negativity = kNegativityTolerance;
  double ceiling = kCeilingTolerance;
  double envelope = 1e-8;
};

/// Invariant-region and envelope audit over every snapshot and the per-step
/// extrema of a trajectory: N, A, D >= 0, D <= mu/tau, N <= |N0| + r_N T and
/// A <= C_lambda |A0|, T taken from p. Failures are report entries.
AuditReport audit_bounds(const StateTrajectory& traj, const ModelParams& p,
                         const BoundTolerances& tol = {});

/// Compares lambda_op / theta_op against per-node dense RK4 integration
/// (step <= 1e-4) of the tumor and normal ODEs driven by the history's |D|,
/// interpolated linearly between stamps. Passes iff both L-inf gaps <= tol.
AuditReport oracle_kernels(const DrugHistory& hist, const Field& N0, const Field& A0,
                           const ModelParams& p, double tol);

/// Random drug history on [0, T] with `intervals` equal steps: each node
/// follows a piecewise-linear path through `knots` values drawn from
/// [0, sup].
DrugHistory random_drug_history(const Grid& grid, double T, std::size_t intervals, double sup,
                                std::size_t knots, std::uint64_t seed);

/// oracle_kernels over `histories` seeded random cases (1D, n = 10, T = 5,
/// base rates with alpha_A = 10). Reports the worst case of each check.
AuditReport kernel_oracle_suite(std::size_t histories, std::uint64_t seed, double tol = 1e-6);

/// g(t_k) = int_0^{t_k} f / f(t_k) on the uniform grid t_k = k h, where
/// f = exp(int_0^t q) and q is given at the grid points (linear between).
/// The exponent is taken linear per cell, so each cell integral is exact
/// for that f.
std::vector<double> ratio_profile(std::span<const double> rate, double h);

/// Checks int_0^t f / f(t) <= t for random positive nondecreasing f built
/// as exp of the integral of a nonnegative random piecewise-linear rate.
AuditReport audit_ratio_bound(std::size_t samples, std::uint64_t seed, double horizon = 25.0);

/// Empirical Lipschitz quotients of Lambda and Theta over random bounded
/// drug-trajectory pairs, compared with lipschitz_constants.
AuditReport audit_lipschitz(const ModelParams& p, double T, std::size_t trials,
                            std::uint64_t seed);

}  // namespace tumorsim
