#include "tumorsim/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "tumorsim/error.hpp"

namespace tumorsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", line, what));
}

double number(const Entry& e) {
  const auto v = to_double(e.value);
  if (!v) parse_fail(e.line, fmt::format("'{}' is not a number", e.value));
  return *v;
}

int integer(const Entry& e) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size() || e.value.empty())
    parse_fail(e.line, fmt::format("'{}' is not an integer", e.value));
  return v;
}

std::vector<double> numbers(const Entry& e) {
  std::vector<double> out;
  if (trim(e.value).empty()) return out;
  for (auto part : split(e.value, ',')) {
    const auto v = to_double(part);
    if (!v) parse_fail(e.line, fmt::format("'{}' is not a number", part));
    out.push_back(*v);
  }
  return out;
}

using ModelField = double ModelParams::*;

const std::map<std::string, ModelField, std::less<>>& model_fields() {
  static const std::map<std::string, ModelField, std::less<>> fields{
      {"r_N", &ModelParams::r_N},         {"mu_N", &ModelParams::mu_N},
      {"beta_1", &ModelParams::beta_1},   {"r_A", &ModelParams::r_A},
      {"k_A", &ModelParams::k_A},         {"mu_A", &ModelParams::mu_A},
      {"eps_A", &ModelParams::eps_A},     {"alpha_N", &ModelParams::alpha_N},
      {"alpha_A", &ModelParams::alpha_A}, {"gamma_N", &ModelParams::gamma_N},
      {"gamma_A", &ModelParams::gamma_A}, {"mu", &ModelParams::mu},
      {"tau", &ModelParams::tau},         {"sigma", &ModelParams::sigma},
      {"T", &ModelParams::T},
  };
  return fields;
}

constexpr const char* kModelOrder[] = {"r_N",     "mu_N",    "beta_1",  "r_A",     "k_A",
                                       "mu_A",    "eps_A",   "alpha_N", "alpha_A", "gamma_N",
                                       "gamma_A", "mu",      "tau",     "sigma",   "T"};

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

RunConfig parse_config(std::string_view text) {
  static const std::map<std::string, std::vector<std::string>, std::less<>> kKeys{
      {"scenario", {"builtin", "id", "name", "snapshot_times", "source_sampling"}},
      {"domain", {"dim", "length", "n", "omega"}},
      {"model", {}},
      {"solver",
       {"method", "dt", "picard_tol", "picard_max_iter", "picard_initial_guess",
        "picard_history_stride", "stationarity_lag"}},
  };

  std::vector<Entry> entries;
  std::string section;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kKeys.count(section)) parse_fail(line_no, fmt::format("unknown section [{}]", section));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_fail(line_no, "expected key = value");
    if (section.empty()) parse_fail(line_no, "key outside of a section");
    Entry e{section, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    if (e.key.empty()) parse_fail(line_no, "empty key");
    if (section == "model" && (e.key == "lambda" || e.key == "c_lambda"))
      throw Error(ErrorCode::ValidationError,
                  fmt::format("line {}: '{}' is derived from the other rates", line_no, e.key));
    const auto& allowed = kKeys.find(section)->second;
    const bool known = section == "model" ? model_fields().count(e.key) > 0
                                          : std::find(allowed.begin(), allowed.end(), e.key) != allowed.end();
    if (!known)
      throw Error(ErrorCode::UnknownKey, fmt::format("line {}: unknown key '{}' in [{}]", line_no, e.key, section));
    for (const auto& prev : entries) {
      if (prev.section == e.section && prev.key == e.key)
        parse_fail(line_no, fmt::format("duplicate key '{}'", e.key));
    }
    entries.push_back(std::move(e));
  }

  ScenarioSpec spec;
  bool builtin = false;
  for (const auto& e : entries) {
    if (e.section == "scenario" && e.key == "builtin") {
      spec = builtin_scenario(integer(e));
      builtin = true;
    }
  }
  if (!builtin) {
    spec.model = base_params();
    spec.name = "custom";
  }

  bool omega_set = builtin, times_set = builtin;
  std::vector<const Entry*> solver_entries;
  for (const auto& e : entries) {
    if (e.section == "scenario") {
      if (e.key == "id") spec.id = integer(e);
      else if (e.key == "name") spec.name = e.value;
      else if (e.key == "snapshot_times") {
        spec.snapshot_times = numbers(e);
        times_set = true;
      }
      else if (e.key == "source_sampling") spec.sampling = parse_sampling(e.value);
    } else if (e.section == "domain") {
      if (e.key == "dim") spec.dim = integer(e);
      else if (e.key == "length") spec.length = number(e);
      else if (e.key == "n") spec.n = integer(e);
      else if (e.key == "omega") {
        const auto v = numbers(e);
        if (v.size() == 2) spec.omega = Region::interval(v[0], v[1]);
        else if (v.size() == 4) spec.omega = Region::box(v[0], v[1], v[2], v[3]);
        else parse_fail(e.line, "omega takes 2 (1D) or 4 (2D) bounds");
        omega_set = true;
      }
    } else if (e.section == "model") {
      spec.model.*(model_fields().find(e.key)->second) = number(e);
    } else if (e.section == "solver") {
      solver_entries.push_back(&e);
    }
  }
  if (!omega_set) throw Error(ErrorCode::ValidationError, "custom scenario needs [domain] omega");
  if (!times_set) {
    spec.snapshot_times = spec.dim == 2 ? std::vector<double>{0.0, 1.0, 15.0}
                                        : std::vector<double>{0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 25.0};
    std::erase_if(spec.snapshot_times, [&](double t) { return t > spec.model.T; });
  }
  spec = validate_spec(spec);

  SolverConfig cfg = default_solver_config(spec);
  for (const Entry* e : solver_entries) {
    if (e->key == "method") cfg.method = parse_method(e->value);
    else if (e->key == "dt") cfg.dt = number(*e);
    else if (e->key == "picard_tol") cfg.picard.tol = number(*e);
    else if (e->key == "picard_max_iter") cfg.picard.max_iter = integer(*e);
    else if (e->key == "picard_initial_guess") {
      if (e->value == "none") cfg.picard.initial_guess.reset();
      else cfg.picard.initial_guess = number(*e);
    } else if (e->key == "picard_history_stride") {
      const int v = integer(*e);
      if (v < 0) throw Error(ErrorCode::ValidationError, "picard_history_stride must be >= 0");
      cfg.picard.history_stride = static_cast<std::size_t>(v);
    } else if (e->key == "stationarity_lag") cfg.stationarity_lag = number(*e);
  }
  if (!(cfg.dt >= 0.0)) throw Error(ErrorCode::ValidationError, "dt must be >= 0");
  if (!(cfg.picard.tol > 0.0)) throw Error(ErrorCode::ValidationError, "picard_tol must be positive");
  if (cfg.picard.max_iter < 1) throw Error(ErrorCode::ValidationError, "picard_max_iter must be >= 1");
  if (!(cfg.stationarity_lag >= 0.0)) throw Error(ErrorCode::ValidationError, "stationarity_lag must be >= 0");
  return RunConfig{std::move(spec), std::move(cfg)};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ScenarioSpec& spec, const SolverConfig& solver) {
  std::string out;
  auto kv = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  out += "[scenario]\n";
  kv("id", std::to_string(spec.id));
  kv("name", spec.name);
  kv("snapshot_times", join(spec.snapshot_times));
  kv("source_sampling", std::string(to_string(spec.sampling)));
  out += "\n[domain]\n";
  kv("dim", std::to_string(spec.dim));
  kv("length", format_number(spec.length));
  kv("n", std::to_string(spec.n));
  if (spec.dim == 2)
    kv("omega", join({spec.omega.lower[0], spec.omega.upper[0], spec.omega.lower[1], spec.omega.upper[1]}));
  else
    kv("omega", join({spec.omega.lower[0], spec.omega.upper[0]}));
  out += "\n[model]\n";
  for (const char* key : kModelOrder) kv(key, format_number(spec.model.*(model_fields().find(key)->second)));
  out += "\n[solver]\n";
  kv("method", std::string(to_string(solver.method)));
  kv("dt", format_number(solver.dt));
  kv("picard_tol", format_number(solver.picard.tol));
  kv("picard_max_iter", std::to_string(solver.picard.max_iter));
  kv("picard_initial_guess",
     solver.picard.initial_guess ? format_number(*solver.picard.initial_guess) : std::string("none"));
  kv("picard_history_stride", std::to_string(solver.picard.history_stride));
  kv("stationarity_lag", format_number(solver.stationarity_lag));
  return out;
}

std::string snapshot_csv(const State& state) {
  const Grid& grid = state.N.grid();
  const bool two_d = grid.dim() == 2;
  std::string out = two_d ? "x,y,N,A,D\n" : "x,N,A,D\n";
  for (std::size_t i = 0; i < state.N.size(); ++i) {
    const auto pos = grid.position(i);
    if (two_d)
      out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", pos[0], pos[1], state.N[i], state.A[i],
                         state.D[i]);
    else
      out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", pos[0], state.N[i], state.A[i], state.D[i]);
  }
  return out;
}

void write_snapshot(const State& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << snapshot_csv(state);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

State read_snapshot(const std::filesystem::path& path, const Grid& grid, double t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  const bool two_d = grid.dim() == 2;
  const std::size_t columns = two_d ? 5 : 4;
  const std::size_t offset = columns - 3;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  if (line != (two_d ? "x,y,N,A,D" : "x,N,A,D"))
    throw Error(ErrorCode::GridMismatch, path.string() + ": header '" + line + "' does not match the grid");

  State s{t, Field(grid), Field(grid), Field(grid)};
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != columns)
      throw Error(ErrorCode::ParseError, fmt::format("{}: row {} has {} columns", path.string(), row + 2, parts.size()));
    if (row >= grid.node_count())
      throw Error(ErrorCode::GridMismatch, path.string() + ": more rows than grid nodes");
    double v[5];
    for (std::size_t c = 0; c < columns; ++c) {
      const auto parsed = to_double(parts[c]);
      if (!parsed) throw Error(ErrorCode::ParseError, fmt::format("{}: bad number on row {}", path.string(), row + 2));
      v[c] = *parsed;
    }
    s.N[row] = v[offset];
    s.A[row] = v[offset + 1];
    s.D[row] = v[offset + 2];
    ++row;
  }
  if (row != grid.node_count())
    throw Error(ErrorCode::GridMismatch, fmt::format("{}: {} rows for {} nodes", path.string(), row, grid.node_count()));
  return s;
}

std::string code_version() { return TUMORSIM_VERSION; }

namespace {

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::json to_json(const ModelParams& p) {
  nlohmann::json j;
  for (const char* key : kModelOrder) j[key] = num(p.*(model_fields().find(key)->second));
  j["lambda"] = num(p.lambda);
  j["c_lambda"] = num(p.c_lambda);
  return j;
}

nlohmann::json to_json(const ScenarioSpec& spec) {
  nlohmann::json omega = spec.dim == 2
                             ? nlohmann::json{{spec.omega.lower[0], spec.omega.upper[0]},
                                              {spec.omega.lower[1], spec.omega.upper[1]}}
                             : nlohmann::json{spec.omega.lower[0], spec.omega.upper[0]};
  return {{"id", spec.id},
          {"name", spec.name},
          {"dim", spec.dim},
          {"length", spec.length},
          {"n", spec.n},
          {"omega", omega},
          {"model", to_json(spec.model)},
          {"t_end", spec.t_end()},
          {"snapshot_times", spec.snapshot_times},
          {"source_sampling", to_string(spec.sampling)}};
}

nlohmann::json to_json(const SolverConfig& cfg) {
  return {{"method", to_string(cfg.method)},
          {"dt", cfg.dt},
          {"t_end", cfg.t_end},
          {"snapshot_times", cfg.snapshot_times},
          {"stationarity_lag", cfg.stationarity_lag},
          {"picard",
           {{"tol", cfg.picard.tol},
            {"max_iter", cfg.picard.max_iter},
            {"initial_guess", cfg.picard.initial_guess ? num(*cfg.picard.initial_guess) : nlohmann::json(nullptr)},
            {"history_stride", cfg.picard.history_stride}}}};
}

nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"worst_margin", num(c.worst_margin)},
          {"node", c.node}, {"t", num(c.t)},      {"detail", c.detail}};
}

nlohmann::json to_json(const AuditReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"suite", r.suite}, {"seed", r.seed}, {"passed", r.passed()}, {"checks", checks}};
}

nlohmann::json to_json(const Classification& c) {
  return {{"label", to_string(c.outcome)},
          {"max_A_final", num(c.max_A_final)},
          {"min_N_final", num(c.min_N_final)},
          {"near_stationary", c.near_stationary},
          {"stationary_gap", num(c.stationary_gap)}};
}

std::string snapshot_file_name(std::size_t index, double time) {
  return fmt::format("snapshot_{:02d}_t{:g}.csv", index, time);
}

RunFiles write_run(const ScenarioRun& run, const ScenarioSpec& spec, const SolverConfig& solver,
                   std::uint64_t seed, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  RunFiles files;
  nlohmann::json index = nlohmann::json::array();
  const auto& snaps = run.trajectory.snapshots;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const std::string name = snapshot_file_name(k, snaps[k].requested_time);
    write_snapshot(snaps[k].state, out_dir / name);
    files.snapshots.push_back(out_dir / name);
    index.push_back({{"file", name}, {"requested_time", snaps[k].requested_time}, {"time", snaps[k].state.t}});
  }

  const OutcomeReport& rep = run.report;
  nlohmann::json manifest{
      {"code_version", code_version()},
      {"seed", seed},
      {"spec", to_json(spec)},
      {"solver", to_json(solver)},
      {"grid", {{"dim", run.trajectory.grid.dim()}, {"n", run.trajectory.grid.steps()}, {"nodes", run.trajectory.grid.node_count()}}},
      {"dt", run.trajectory.dt},
      {"steps", run.trajectory.steps},
      {"snapshots", index},
      {"outcome", to_json(rep.classification)},
      {"audit", to_json(rep.audit)},
      {"passed", rep.passed()},
      {"wall_clock", {{"finished_utc", utc_now()}, {"elapsed_seconds", rep.wall_seconds}}},
  };
  if (rep.picard_audit) {
    manifest["picard"] = {{"audit", to_json(*rep.picard_audit)},
                          {"iterations", rep.picard_iterations},
                          {"snapshot_gap", num(rep.picard_gap.value_or(0.0))},
                          {"residual", num(run.picard ? run.picard->picard_residual : 0.0)}};
  }

  files.manifest = out_dir / "manifest.json";
  std::ofstream out(files.manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + files.manifest.string() + " for writing");
  out << manifest.dump(2) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + files.manifest.string());
  return files;
}

}  // namespace tumorsim
