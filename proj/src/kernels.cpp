#include "tumorsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "tumorsim/error.hpp"

namespace tumorsim {

DrugHistory::DrugHistory(const Grid& grid) : grid_(grid) {}

double DrugHistory::last_time() const {
  if (times_.empty()) throw Error(ErrorCode::HistoryTooShort, "drug history is empty");
  return times_.back();
}

void DrugHistory::append(double t, const Field& drug) {
  if (!(drug.grid() == grid_)) throw Error(ErrorCode::GridMismatch, "drug field on a different grid");
  if (times_.empty()) {
    if (t != 0.0) throw Error(ErrorCode::ConfigError, "drug history must start at t = 0");
    abs_integrals_.emplace_back(drug.size(), 0.0);
  } else {
    if (!(t > times_.back())) {
      throw Error(ErrorCode::ConfigError, "drug history stamps must increase strictly");
    }
    const double dt = t - times_.back();
    const Field& prev = fields_.back();
    std::vector<double> next = abs_integrals_.back();
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] += 0.5 * dt * (std::abs(prev[i]) + std::abs(drug[i]));
    }
    abs_integrals_.push_back(std::move(next));
  }
  times_.push_back(t);
  fields_.push_back(drug);
}

namespace {

// (1 - e^{-d}) / d for d >= 0, continuous at 0.
double relative_segment(double d) {
  if (d < 1e-8) return 1.0 - 0.5 * d;
  return -std::expm1(-d) / d;
}

// Integral over an interval of length h of e^{x(s) - ref}, x linear from a to b.
double exp_segment(double a, double b, double h, double ref) {
  const double top = std::max(a, b);
  return h * std::exp(top - ref) * relative_segment(std::abs(b - a));
}

}  // namespace

KernelAccumulator::KernelAccumulator(const ModelParams& p, std::span<const double> normal0,
                                     std::span<const double> tumor0, std::span<const double> phi0)
    : lambda_(p.r_A - (p.mu_A + p.eps_A)),
      tumor_kill_(p.alpha_A * p.gamma_A),
      normal_kill_(p.alpha_N * p.gamma_N),
      r_A_(p.r_A),
      k_A_(p.k_A),
      r_N_(p.r_N),
      mu_N_(p.mu_N),
      beta_1_(p.beta_1),
      tumor0_(tumor0.begin(), tumor0.end()),
      normal0_(normal0.begin(), normal0.end()) {
  const std::size_t n = tumor0.size();
  if (normal0.size() != n || phi0.size() != n) {
    throw Error(ErrorCode::GridMismatch, "kernel inputs have different sizes");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (tumor0[i] < 0.0 || normal0[i] < 0.0) {
      throw Error(ErrorCode::NegativeInput, "initial populations must be nonnegative");
    }
  }
  phi_abs_.resize(n);
  std::transform(phi0.begin(), phi0.end(), phi_abs_.begin(), [](double v) { return std::abs(v); });
  abs_int_.assign(n, 0.0);
  tumor_exp_.assign(n, 0.0);
  tumor_peak_.assign(n, 0.0);
  tumor_scaled_.assign(n, 0.0);
  tumor_ = tumor0_;
  tumor_int_.assign(n, 0.0);
  normal_exp_.assign(n, 0.0);
  normal_ratio_.assign(n, 0.0);
  normal_ = normal0_;
}

void KernelAccumulator::advance(double dt, std::span<const double> phi_next) {
  const double logistic = r_A_ / k_A_;
  for (std::size_t i = 0; i < tumor_.size(); ++i) {
    const double abs_next = std::abs(phi_next[i]);
    const double abs_inc = 0.5 * dt * (phi_abs_[i] + abs_next);
    abs_int_[i] += abs_inc;

    // Tumor: Lambda = A0 k_A e^F / (k_A + A0 r_A int e^F), rescaled by the peak of F.
    const double f_old = tumor_exp_[i];
    const double f_new = f_old + lambda_ * dt - tumor_kill_ * abs_inc;
    const double peak = std::max(tumor_peak_[i], f_new);
    tumor_scaled_[i] = tumor_scaled_[i] * std::exp(tumor_peak_[i] - peak) +
                       exp_segment(f_old, f_new, dt, peak);
    tumor_peak_[i] = peak;
    tumor_exp_[i] = f_new;

    const double a0 = tumor0_[i];
    const double lam_old = tumor_[i];
    double lam_new = 0.0;
    if (a0 > 0.0) {
      lam_new = a0 * k_A_ * std::exp(f_new - peak) /
                (k_A_ * std::exp(-peak) + a0 * r_A_ * tumor_scaled_[i]);
    }
    tumor_[i] = lam_new;

    const double slope_old = (lambda_ - tumor_kill_ * phi_abs_[i]) * lam_old - logistic * lam_old * lam_old;
    const double slope_new = (lambda_ - tumor_kill_ * abs_next) * lam_new - logistic * lam_new * lam_new;
    const double lam_inc = 0.5 * dt * (lam_old + lam_new) + dt * dt / 12.0 * (slope_old - slope_new);
    tumor_int_[i] += lam_inc;

    // Normal: Theta = N0 e^{-G} + r_N int_0^t e^{G(s) - G(t)} ds, G nondecreasing.
    const double g_old = normal_exp_[i];
    const double g_new = g_old + mu_N_ * dt + normal_kill_ * abs_inc + beta_1_ * lam_inc;
    normal_ratio_[i] = normal_ratio_[i] * std::exp(g_old - g_new) + exp_segment(g_old, g_new, dt, g_new);
    normal_exp_[i] = g_new;
    normal_[i] = normal0_[i] * std::exp(-g_new) + r_N_ * normal_ratio_[i];

    phi_abs_[i] = abs_next;
  }
  t_ += dt;
}

namespace {

void require_nonnegative(const Field& f, const char* name) {
  if (f.min() < 0.0) {
    throw Error(ErrorCode::NegativeInput, std::string(name) + " has a negative entry");
  }
}

// Runs the accumulator over the history up to time t.
KernelAccumulator march(const DrugHistory& hist, const Field& N0, const Field& A0,
                        const ModelParams& p, double t) {
  if (hist.empty()) throw Error(ErrorCode::HistoryTooShort, "drug history is empty");
  if (!(A0.grid() == hist.grid()) || !(N0.grid() == hist.grid())) {
    throw Error(ErrorCode::GridMismatch, "initial data and history on different grids");
  }
  require_nonnegative(A0, "A0");
  require_nonnegative(N0, "N0");
  const double last = hist.last_time();
  const double slack = 1e-12 * std::max(1.0, last);
  if (t < 0.0 || t > last + slack) {
    throw Error(ErrorCode::HistoryTooShort, "t = " + std::to_string(t) +
                                                " outside stored history [0, " +
                                                std::to_string(last) + "]");
  }
  KernelAccumulator acc(p, N0.values(), A0.values(), hist.field(0).values());
  std::size_t k = 1;
  for (; k < hist.size() && hist.time(k) <= t + slack; ++k) {
    acc.advance(hist.time(k) - hist.time(k - 1), hist.field(k).values());
  }
  if (k < hist.size() && t - hist.time(k - 1) > slack) {
    const double t0 = hist.time(k - 1);
    const double w = (t - t0) / (hist.time(k) - t0);
    const Field& a = hist.field(k - 1);
    const Field& b = hist.field(k);
    std::vector<double> phi(a.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = (1.0 - w) * a[i] + w * b[i];
    acc.advance(t - t0, phi);
  }
  return acc;
}

}  // namespace

Field lambda_op(const DrugHistory& hist, const Field& A0, const ModelParams& p, double t) {
  const KernelAccumulator acc = march(hist, Field(A0.grid()), A0, p, t);
  return Field(A0.grid(), std::vector<double>(acc.tumor().begin(), acc.tumor().end()));
}

Field theta_op(const DrugHistory& hist, const Field& N0, const Field& A0, const ModelParams& p,
               double t) {
  const KernelAccumulator acc = march(hist, N0, A0, p, t);
  return Field(N0.grid(), std::vector<double>(acc.normal().begin(), acc.normal().end()));
}

KernelConstants lipschitz_constants(const ModelParams& p, double A0_sup, double N0_sup,
                                    double phi_sup) {
  const double T = p.T;
  const double lambda = p.r_A - (p.mu_A + p.eps_A);
  const double c_lambda = std::max(1.0, std::exp(lambda * T));
  const double tumor_kill = p.alpha_A * p.gamma_A;
  const double normal_kill = p.alpha_N * p.gamma_N;

  const double T2 = T * T;
  // A zero factor wins over an overflowed exponential.
  auto product = [](std::initializer_list<double> factors) {
    double out = 1.0;
    for (double f : factors) {
      if (f == 0.0) return 0.0;
      out *= f;
    }
    return out;
  };

  KernelConstants k;
  k.c1 = product({A0_sup, c_lambda, tumor_kill, T}) +
         product({2.0 / p.k_A, A0_sup, A0_sup, p.r_A, c_lambda, c_lambda, tumor_kill, T2});

  const double phi_growth = std::exp(normal_kill * T * phi_sup);
  const double tumor_growth = std::exp(product({p.beta_1, T, c_lambda, A0_sup}));
  const double mortality_growth = std::exp(p.mu_N * T);
  k.c2 = product({N0_sup, phi_growth, p.beta_1, T2, k.c1}) +
         product({N0_sup, tumor_growth, normal_kill, T2}) +
         product({p.r_N, mortality_growth, phi_growth, tumor_growth, p.beta_1, T2, k.c1}) +
         product({p.r_N, mortality_growth, phi_growth, tumor_growth, normal_kill, T2});
  return k;
}

Envelope bound_envelope(const ModelParams& p, double N0_sup, double A0_sup) {
  const double lambda = p.r_A - (p.mu_A + p.eps_A);
  const double c_lambda = std::max(1.0, std::exp(lambda * p.T));
  return {N0_sup + p.r_N * p.T, c_lambda * A0_sup};
}

}  // namespace tumorsim
