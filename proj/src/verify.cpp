#include "tumorsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace tumorsim {

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult& AuditReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check named " + name);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tracks the smallest margin seen for one inequality.
struct MarginTracker {
  std::string name;
  double tolerance = 0.0;
  CheckResult result{name, true, kInf, 0, 0.0, {}};

  MarginTracker(std::string n, double tol) : name(std::move(n)), tolerance(tol) { result.name = name; }

  void offer(double margin, std::size_t node, double t) {
    if (margin < result.worst_margin) {
      result.worst_margin = margin;
      result.node = node;
      result.t = t;
    }
  }

  CheckResult finish() {
    result.passed = result.worst_margin >= -tolerance;
    return result;
  }
};

}  // namespace

AuditReport audit_bounds(const StateTrajectory& traj, const ModelParams& p, const BoundTolerances& tol) {
  const double ceiling = drug_ceiling(p);
  const double N0_sup = traj.initial.N.size() ? traj.initial.N.max_abs() : 0.0;
  const double A0_sup = traj.initial.A.size() ? traj.initial.A.max_abs() : 0.0;
  const Envelope env = bound_envelope(p, N0_sup, A0_sup);

  MarginTracker n_low("N_nonnegative", tol.negativity);
  MarginTracker a_low("A_nonnegative", tol.negativity);
  MarginTracker d_low("D_nonnegative", tol.negativity);
  MarginTracker d_high("D_ceiling", tol.ceiling);
  MarginTracker n_high("N_envelope", tol.envelope);
  MarginTracker a_high("A_envelope", tol.envelope);

  auto scan = [&](const State& s) {
    if (s.N.size() == 0) return;
    for (std::size_t i = 0; i < s.N.size(); ++i) {
      n_low.offer(s.N[i], i, s.t);
      a_low.offer(s.A[i], i, s.t);
      d_low.offer(s.D[i], i, s.t);
      d_high.offer(ceiling - s.D[i], i, s.t);
      n_high.offer(env.N_max - s.N[i], i, s.t);
      a_high.offer(env.A_max - s.A[i], i, s.t);
    }
  };
  scan(traj.initial);
  for (const auto& snap : traj.snapshots) scan(snap.state);
  scan(traj.final_state);

  const auto& ex = traj.extrema;
  auto offer_low = [](MarginTracker& m, const Extremum& e) {
    if (std::isfinite(e.value) || std::isnan(e.value)) m.offer(std::isnan(e.value) ? -kInf : e.value, e.node, e.t);
  };
  auto offer_high = [](MarginTracker& m, double bound, const Extremum& e) {
    if (std::isfinite(e.value) || std::isnan(e.value)) m.offer(std::isnan(e.value) ? -kInf : bound - e.value, e.node, e.t);
  };
  offer_low(n_low, ex.min_N);
  offer_low(a_low, ex.min_A);
  offer_low(d_low, ex.min_D);
  offer_high(d_high, ceiling, ex.max_D);
  offer_high(n_high, env.N_max, ex.max_N);
  offer_high(a_high, env.A_max, ex.max_A);

  AuditReport report;
  report.suite = "bounds";
  for (auto* m : {&n_low, &a_low, &d_low, &d_high, &n_high, &a_high}) report.checks.push_back(m->finish());
  return report;
}

AuditReport oracle_kernels(const DrugHistory& hist, const Field& N0, const Field& A0,
                           const ModelParams& p, double tol) {
  constexpr double kMaxStep = 1e-4;
  const double lambda = p.r_A - (p.mu_A + p.eps_A);
  const double logistic = p.r_A / p.k_A;
  const double normal_kill = p.alpha_N * p.gamma_N;
  const double tumor_kill = p.alpha_A * p.gamma_A;

  KernelAccumulator acc(p, N0.values(), A0.values(), hist.field(0).values());
  const std::size_t nodes = N0.size();
  std::vector<double> n_ode(N0.values().begin(), N0.values().end());
  std::vector<double> a_ode(A0.values().begin(), A0.values().end());

  MarginTracker lam("lambda_oracle", 0.0);
  MarginTracker theta("theta_oracle", 0.0);
  for (std::size_t k = 1; k < hist.size(); ++k) {
    const double t0 = hist.time(k - 1);
    const double span = hist.time(k) - t0;
    const auto& d0 = hist.field(k - 1);
    const auto& d1 = hist.field(k);
    const auto sub = static_cast<std::size_t>(std::ceil(span / kMaxStep - 1e-9));
    const double h = span / static_cast<double>(sub);
    for (std::size_t i = 0; i < nodes; ++i) {
      const double u0 = std::abs(d0[i]);
      const double u1 = std::abs(d1[i]);
      auto drug = [&](double s) { return u0 + (u1 - u0) * (s / span); };
      auto f = [&](double s, double n, double a, double& dn, double& da) {
        const double d = drug(s);
        dn = p.r_N - p.mu_N * n - p.beta_1 * n * a - normal_kill * d * n;
        da = lambda * a - logistic * a * a - tumor_kill * d * a;
      };
      double n = n_ode[i], a = a_ode[i];
      for (std::size_t j = 0; j < sub; ++j) {
        const double s = static_cast<double>(j) * h;
        double n1, a1, n2, a2, n3, a3, n4, a4;
        f(s, n, a, n1, a1);
        f(s + 0.5 * h, n + 0.5 * h * n1, a + 0.5 * h * a1, n2, a2);
        f(s + 0.5 * h, n + 0.5 * h * n2, a + 0.5 * h * a2, n3, a3);
        f(s + h, n + h * n3, a + h * a3, n4, a4);
        n += h / 6.0 * (n1 + 2.0 * n2 + 2.0 * n3 + n4);
        a += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
      }
      n_ode[i] = n;
      a_ode[i] = a;
    }
    acc.advance(span, d1.values());
    for (std::size_t i = 0; i < nodes; ++i) {
      lam.offer(tol - std::abs(acc.tumor()[i] - a_ode[i]), i, hist.time(k));
      theta.offer(tol - std::abs(acc.normal()[i] - n_ode[i]), i, hist.time(k));
    }
  }
  AuditReport report;
  report.suite = "kernels";
  report.checks.push_back(lam.finish());
  report.checks.push_back(theta.finish());
  return report;
}

std::vector<double> ratio_profile(std::span<const double> rate, double h) {
  std::vector<double> g(rate.size(), 0.0);
  for (std::size_t c = 1; c < rate.size(); ++c) {
    const double d = 0.5 * h * (rate[c - 1] + rate[c]);
    const double seg = d < 1e-8 ? h * (1.0 - 0.5 * d) : -h * std::expm1(-d) / d;
    g[c] = g[c - 1] * std::exp(-d) + seg;
  }
  return g;
}

AuditReport audit_ratio_bound(std::size_t samples, std::uint64_t seed, double horizon) {
  constexpr std::size_t kCells = 2000;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> knot_count(1, 8);

  MarginTracker below_t("ratio_le_t", 1e-12 * horizon);
  MarginTracker below_T("ratio_le_T", 1e-12 * horizon);
  const double h = horizon / static_cast<double>(kCells);

  for (std::size_t sample = 0; sample < samples; ++sample) {
    // Nonnegative piecewise-linear rate q on [0, horizon], knots on the cell grid.
    const int knots = knot_count(rng);
    std::vector<std::size_t> knot_cells{0, kCells};
    for (int k = 0; k < knots; ++k) knot_cells.push_back(static_cast<std::size_t>(unit(rng) * kCells));
    std::sort(knot_cells.begin(), knot_cells.end());
    knot_cells.erase(std::unique(knot_cells.begin(), knot_cells.end()), knot_cells.end());
    const double scale = 3.0 * unit(rng);
    std::vector<double> knot_rate(knot_cells.size());
    for (double& q : knot_rate) q = scale * unit(rng);

    std::vector<double> rate(kCells + 1);
    for (std::size_t k = 0; k + 1 < knot_cells.size(); ++k) {
      const std::size_t c0 = knot_cells[k], c1 = knot_cells[k + 1];
      for (std::size_t c = c0; c <= c1; ++c) {
        const double w = static_cast<double>(c - c0) / static_cast<double>(c1 - c0);
        rate[c] = (1.0 - w) * knot_rate[k] + w * knot_rate[k + 1];
      }
    }

    const std::vector<double> g = ratio_profile(rate, h);
    for (std::size_t c = 1; c <= kCells; ++c) {
      const double t = static_cast<double>(c) * h;
      below_t.offer(t - g[c], sample, t);
      below_T.offer(horizon - g[c], sample, t);
    }
  }
  AuditReport report;
  report.suite = "ratio";
  report.seed = seed;
  report.checks.push_back(below_t.finish());
  report.checks.push_back(below_T.finish());
  return report;
}

namespace {

// Random piecewise-linear-in-time drug trajectory with knots on stamps.
std::vector<Field> random_history(const Grid& grid, std::size_t stamps, double sup,
                                  std::mt19937_64& rng, std::size_t knots = 6) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  knots = std::clamp<std::size_t>(knots, 2, stamps);
  std::vector<std::size_t> knot_stamps;
  for (std::size_t k = 0; k < knots; ++k) knot_stamps.push_back(k * (stamps - 1) / (knots - 1));
  std::vector<Field> knot_values;
  for (std::size_t k = 0; k < knots; ++k) {
    Field f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = sup * unit(rng);
    knot_values.push_back(std::move(f));
  }
  std::vector<Field> out;
  for (std::size_t s = 0; s < stamps; ++s) {
    std::size_t k = 0;
    while (k + 2 < knots && knot_stamps[k + 1] <= s) ++k;
    const double w = static_cast<double>(s - knot_stamps[k]) /
                     static_cast<double>(knot_stamps[k + 1] - knot_stamps[k]);
    Field f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = (1.0 - w) * knot_values[k][i] + w * knot_values[k + 1][i];
    out.push_back(std::move(f));
  }
  return out;
}

struct KernelPaths {
  std::vector<std::vector<double>> tumor, normal;
};

KernelPaths evaluate_paths(const ModelParams& p, const Field& N0, const Field& A0,
                           const std::vector<Field>& phi, double dt) {
  KernelAccumulator acc(p, N0.values(), A0.values(), phi.front().values());
  KernelPaths out;
  out.tumor.emplace_back(acc.tumor().begin(), acc.tumor().end());
  out.normal.emplace_back(acc.normal().begin(), acc.normal().end());
  for (std::size_t s = 1; s < phi.size(); ++s) {
    acc.advance(dt, phi[s].values());
    out.tumor.emplace_back(acc.tumor().begin(), acc.tumor().end());
    out.normal.emplace_back(acc.normal().begin(), acc.normal().end());
  }
  return out;
}

double sup_gap(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  double m = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t i = 0; i < a[s].size(); ++i) m = std::max(m, std::abs(a[s][i] - b[s][i]));
  return m;
}

}  // namespace

AuditReport audit_lipschitz(const ModelParams& p, double T, std::size_t trials, std::uint64_t seed) {
  constexpr std::size_t kStamps = 501;
  ModelParams pv = p;
  pv.T = T;
  pv = validate_params(pv);
  const Grid grid = build_grid(1, 1.0, 4);
  const double dt = T / static_cast<double>(kStamps - 1);
  const double phi_cap = pv.mu > 0.0 ? drug_ceiling(pv) : 1.0;
  const double normal_cap = pv.mu_N > 0.0 ? std::max(pv.r_N / pv.mu_N, 1.0) : 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MarginTracker lam("lambda_lipschitz", 0.0);
  MarginTracker theta("theta_lipschitz", 0.0);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Field A0(grid), N0(grid);
    for (std::size_t i = 0; i < A0.size(); ++i) {
      A0[i] = pv.k_A * unit(rng);
      N0[i] = normal_cap * unit(rng);
    }
    const std::vector<Field> phi1 = random_history(grid, kStamps, phi_cap, rng);
    std::vector<Field> phi2;
    switch (trial % 3) {
      case 0:
        phi2 = phi1;
        break;
      case 1: {
        const double shift = phi_cap * (1e-3 + 0.1 * unit(rng));
        phi2 = phi1;
        for (auto& f : phi2)
          for (std::size_t i = 0; i < f.size(); ++i) f[i] += shift;
        break;
      }
      default:
        phi2 = random_history(grid, kStamps, phi_cap, rng);
    }
    double phi_gap = 0.0, phi_sup = 0.0;
    for (std::size_t s = 0; s < kStamps; ++s) {
      phi_gap = std::max(phi_gap, max_abs_difference(phi1[s], phi2[s]));
      phi_sup = std::max({phi_sup, phi1[s].max_abs(), phi2[s].max_abs()});
    }
    const KernelConstants c = lipschitz_constants(pv, A0.max_abs(), N0.max_abs(), phi_sup);
    const KernelPaths a = evaluate_paths(pv, N0, A0, phi1, dt);
    const KernelPaths b = evaluate_paths(pv, N0, A0, phi2, dt);
    const double q_lam = phi_gap > 0.0 ? sup_gap(a.tumor, b.tumor) / phi_gap : 0.0;
    const double q_theta = phi_gap > 0.0 ? sup_gap(a.normal, b.normal) / phi_gap : 0.0;
    lam.offer(c.c1 - q_lam, trial, T);
    theta.offer(c.c2 - q_theta, trial, T);
  }
  AuditReport report;
  report.suite = "lipschitz";
  report.seed = seed;
  report.checks.push_back(lam.finish());
  report.checks.push_back(theta.finish());
  return report;
}

}  // namespace tumorsim

namespace tumorsim {

DrugHistory random_drug_history(const Grid& grid, double T, std::size_t intervals, double sup,
                                std::size_t knots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<Field> path = random_history(grid, intervals + 1, sup, rng, std::max<std::size_t>(knots, 2));
  DrugHistory hist(grid);
  const double dt = T / static_cast<double>(intervals);
  for (std::size_t s = 0; s <= intervals; ++s) hist.append(static_cast<double>(s) * dt, path[s]);
  return hist;
}

AuditReport kernel_oracle_suite(std::size_t histories, std::uint64_t seed, double tol) {
  ModelParams p;
  p.r_N = 1.0;
  p.mu_N = 1.0;
  p.beta_1 = 1.5;
  p.r_A = 1.0;
  p.mu_A = 0.05;
  p.eps_A = 0.05;
  p.alpha_N = 1.0;
  p.alpha_A = 10.0;
  p.gamma_N = 0.1;
  p.gamma_A = 1.0;
  p.mu = 3.0;
  p.tau = 0.9;
  p.sigma = 0.1;
  p.T = 5.0;
  p = validate_params(p);
  const Grid grid = build_grid(1, 1.0, 10);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  AuditReport total;
  total.suite = "kernels";
  total.seed = seed;
  for (std::size_t h = 0; h < histories; ++h) {
    Field N0(grid), A0(grid);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      N0[i] = unit(rng);
      A0[i] = unit(rng);
    }
    const std::size_t knots = 3 + rng() % 10;
    const DrugHistory hist = random_drug_history(grid, p.T, 5000, drug_ceiling(p), knots, rng());
    AuditReport one = oracle_kernels(hist, N0, A0, p, tol);
    for (auto& c : one.checks) {
      c.node += h * grid.node_count();
      auto it = std::find_if(total.checks.begin(), total.checks.end(),
                             [&](const CheckResult& x) { return x.name == c.name; });
      if (it == total.checks.end()) {
        total.checks.push_back(c);
      } else if (c.worst_margin < it->worst_margin) {
        *it = c;
      }
    }
  }
  for (auto& c : total.checks) c.detail = std::to_string(histories) + " histories";
  return total;
}

}  // namespace tumorsim
