#include "tumorsim/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tumorsim/error.hpp"
#include "tumorsim/io.hpp"
#include "tumorsim/scenarios.hpp"
#include "tumorsim/verify.hpp"

namespace tumorsim {

namespace {

bool numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::Instability:
    case ErrorCode::NoConvergence:
    case ErrorCode::DegenerateDenominator:
      return true;
    default:
      return false;
  }
}

std::optional<int> as_scenario_id(const std::string& target) {
  if (target.empty() || target.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return std::stoi(target);
}

void print_report(std::ostream& out, const AuditReport& report) {
  for (const auto& c : report.checks) {
    fmt::print(out, "{} {}/{} worst_margin={:.3e} node={} t={:g}\n", c.passed ? "PASS" : "FAIL", report.suite,
               c.name, c.worst_margin, c.node, c.t);
  }
}

struct RunArgs {
  std::string target;
  std::string method;
  std::optional<double> dt;
  std::string out_dir;
  bool picard_check = false;
  std::uint64_t seed = 0;
};

int do_run(const RunArgs& args, std::ostream& out) {
  RunConfig cfg;
  if (const auto id = as_scenario_id(args.target)) {
    cfg.spec = builtin_scenario(*id);
    cfg.solver = default_solver_config(cfg.spec);
  } else {
    cfg = load_config(args.target);
  }
  if (!args.method.empty()) cfg.solver.method = parse_method(args.method);
  if (args.dt) cfg.solver.dt = *args.dt;

  RunOptions opts;
  opts.picard_check = args.picard_check;
  const ScenarioRun run = run_scenario(cfg.spec, cfg.solver, opts);
  const std::filesystem::path dir = args.out_dir.empty() ? std::filesystem::path("runs") / cfg.spec.name
                                                         : std::filesystem::path(args.out_dir);
  const RunFiles files = write_run(run, cfg.spec, cfg.solver, args.seed, dir);

  const Classification& c = run.report.classification;
  fmt::print(out, "{}: {} max_A(T)={:.6g} min_N(T)={:.6g} steps={} dt={:.6g} wall={:.2f}s\n", cfg.spec.name,
             to_string(c.outcome), c.max_A_final, c.min_N_final, run.trajectory.steps, run.trajectory.dt,
             run.report.wall_seconds);
  print_report(out, run.report.audit);
  if (run.report.picard_audit) {
    fmt::print(out, "picard: {} sweeps, snapshot gap {:.3e}\n", run.report.picard_iterations,
               run.report.picard_gap.value_or(0.0));
    print_report(out, *run.report.picard_audit);
  }
  fmt::print(out, "wrote {} snapshots and {}\n", files.snapshots.size(), files.manifest.string());
  return run.report.passed() ? kExitOk : kExitFailure;
}

std::vector<AuditReport> bounds_suite() {
  std::vector<AuditReport> out;
  for (const auto& spec : builtin_scenarios()) {
    const ScenarioRun run = run_scenario(spec, default_solver_config(spec));
    AuditReport r = run.report.audit;
    r.suite = "bounds/" + spec.name;
    out.push_back(std::move(r));
  }
  return out;
}

int do_verify(const std::string& suite, std::uint64_t seed, const std::string& report_path, std::ostream& out) {
  std::vector<AuditReport> reports;
  const bool all = suite == "all";
  if (all || suite == "bounds") {
    for (auto& r : bounds_suite()) reports.push_back(std::move(r));
  }
  if (all || suite == "kernels") reports.push_back(kernel_oracle_suite(20, seed));
  if (all || suite == "lipschitz") {
    ModelParams p = builtin_scenario(2).model;
    reports.push_back(audit_lipschitz(p, 1.0, 100, seed));
  }
  if (all || suite == "ratio") reports.push_back(audit_ratio_bound(1000, seed));

  bool passed = true;
  for (const auto& r : reports) {
    print_report(out, r);
    passed = passed && r.passed();
  }
  if (!report_path.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) j.push_back(to_json(r));
    std::ofstream f(report_path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot open " + report_path + " for writing");
    f << j.dump(2) << '\n';
  }
  fmt::print(out, "{}\n", passed ? "all checks passed" : "some checks failed");
  return passed ? kExitOk : kExitFailure;
}

void list_scenarios(std::ostream& out) {
  fmt::print(out, "{:<3} {:<14} {:>4} {:>7} {:>4} {:>6}  {}\n", "id", "name", "dim", "alpha_A", "mu", "sigma",
             "omega");
  for (const auto& s : builtin_scenarios()) {
    const std::string omega =
        s.dim == 2 ? fmt::format("[{:g},{:g}]x[{:g},{:g}]", s.omega.lower[0], s.omega.upper[0], s.omega.lower[1],
                                 s.omega.upper[1])
                   : fmt::format("[{:g},{:g}]", s.omega.lower[0], s.omega.upper[0]);
    fmt::print(out, "{:<3} {:<14} {:>4} {:>7g} {:>4g} {:>6g}  {}\n", s.id, s.name, s.dim, s.model.alpha_A, s.model.mu,
               s.model.sigma, omega);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tumor/chemotherapy reaction-diffusion simulator", "tumorsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", code_version());

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a built-in scenario (1-5) or a config file");
  run->add_option("target", run_args.target, "scenario id or config path")->required();
  run->add_option("--method", run_args.method, "rk4 or explicit-euler");
  run->add_option("--dt", run_args.dt, "time step (default: stability-limited)");
  run->add_option("--out-dir", run_args.out_dir, "output directory (default: runs/<name>)");
  run->add_flag("--picard-check", run_args.picard_check, "cross-check with the fixed-point solver");
  run->add_option("--seed", run_args.seed, "seed recorded in the manifest");

  std::string suite = "all";
  std::uint64_t seed = 1;
  std::string report_path;
  auto* verify = app.add_subcommand("verify", "Run the audit suites");
  verify->add_option("--suite", suite, "audit suite")
      ->check(CLI::IsMember({"bounds", "kernels", "lipschitz", "ratio", "all"}));
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--report", report_path, "write the reports as JSON");

  auto* scenarios = app.add_subcommand("scenarios", "List the built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return do_run(run_args, out);
    if (*verify) return do_verify(suite, seed, report_path, out);
    if (*scenarios) {
      list_scenarios(out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return numerical(e.code()) ? kExitFailure : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace tumorsim
