#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "reachkit/models.hpp"
#include "reachkit/solver.hpp"
#include "reachkit/targets.hpp"

namespace reachkit::cli {

/// Target description as written in a run config. `children` holds union
/// members, or the single inner set of a complement.
struct TargetSpec {
  std::string variant;  // box | union | voxel_mask | complement
  std::vector<Interval> box;
  std::string mask_file;
  std::vector<TargetSpec> children;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

/// One run: everything needed to reproduce a solve.
struct RunConfig {
  std::string system;
  ParamSet params;  // overrides on top of the named preset
  TargetSpec target;
  std::vector<Interval> domain;
  std::vector<std::size_t> grid;
  double dt = 0.0;
  SetQuery query;
  std::vector<int> controls;
  std::string output;
  std::optional<int> recursions;

  /// Directory that relative paths (mask files, output) resolve against.
  std::string base_dir = ".";

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.system == b.system && a.params == b.params && a.target == b.target &&
           a.domain == b.domain && a.grid == b.grid && a.dt == b.dt &&
           a.query.kind == b.query.kind && a.query.horizon == b.query.horizon &&
           a.controls == b.controls && a.output == b.output && a.recursions == b.recursions;
  }
};

/// Validates the whole schema; every rejection is a ConfigError naming the key.
RunConfig parse_config(const nlohmann::json& doc, std::string base_dir = ".");
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

/// FNV-1a over the canonical JSON form; changes iff a schema field changes.
std::uint64_t config_hash(const RunConfig& config);
std::string hex64(std::uint64_t x);

/// Resolves the system (preset + overrides), target and grid.
SystemModel build_system(const RunConfig& config);
TargetSet build_target(const TargetSpec& spec, const std::string& base_dir);
TargetSet build_target(const RunConfig& config);
Grid build_grid(const RunConfig& config);

/// Recursions to run: the override if present, else recursions_for_horizon.
int effective_recursions(const RunConfig& config);

/// Solver configuration for the config's query: mode and effective target
/// follow the query kind, so viable/invariant solve against the complement.
SolveConfig build_solve_config(const RunConfig& config, unsigned threads);

std::string resolve_path(const std::string& base_dir, const std::string& path);

}  // namespace reachkit::cli
