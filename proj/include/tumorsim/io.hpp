#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tumorsim/scenarios.hpp"
#include "tumorsim/solver.hpp"
#include "tumorsim/verify.hpp"

namespace tumorsim {

struct RunConfig {
  ScenarioSpec spec;
  SolverConfig solver;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the sectioned key-value format:
///
///     # comment
///     [scenario]
///     builtin = 2          # applied before every other key
///     [model]
///     mu = 6
///
/// Sections are [scenario], [domain], [model] and [solver]; [model] keys
/// are the ModelParams field names. Lists are comma separated. Throws
/// Error(ParseError) with the line number, Error(UnknownKey) naming the key,
/// or the validation error of the assembled spec.
RunConfig parse_config(std::string_view text);

/// Reads and parses a file; Error(IoError) if it cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Writes every field explicitly; parse_config reproduces the input.
std::string serialize_config(const ScenarioSpec& spec, const SolverConfig& solver);

/// Shortest decimal text with 17 significant digits ("%.17g").
std::string format_number(double value);

/// CSV text of one state: header `x,N,A,D` (1D) or `x,y,N,A,D` (2D), one
/// row per node in node order, LF line endings.
std::string snapshot_csv(const State& state);
/// Throws Error(IoError) with the path on failure.
void write_snapshot(const State& state, const std::filesystem::path& path);
/// Reads a snapshot written for `grid`. Throws Error(IoError),
/// Error(ParseError) or Error(GridMismatch).
State read_snapshot(const std::filesystem::path& path, const Grid& grid, double t = 0.0);

std::string code_version();

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const ScenarioSpec& spec);
nlohmann::json to_json(const SolverConfig& cfg);
nlohmann::json to_json(const CheckResult& check);
nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const Classification& c);

struct RunFiles {
  std::vector<std::filesystem::path> snapshots;
  std::filesystem::path manifest;
};

/// Snapshot name for index k: snapshot_<k>_t<time>.csv.
std::string snapshot_file_name(std::size_t index, double time);

/// Writes the snapshots of run.trajectory and then manifest.json into
/// out_dir (created if missing).
RunFiles write_run(const ScenarioRun& run, const ScenarioSpec& spec, const SolverConfig& solver,
                   std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace tumorsim
