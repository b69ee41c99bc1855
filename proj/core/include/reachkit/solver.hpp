#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "reachkit/grid.hpp"
#include "reachkit/models.hpp"
#include "reachkit/targets.hpp"

namespace reachkit {

enum class QueryKind { max_reach, min_reach, viable, invariant };

std::string to_string(QueryKind kind);
QueryKind parse_query_kind(const std::string& text);

/// Which value function answers a query, and against which target.
///   max_reach -> minimize over K        min_reach -> maximize over K
///   viable    -> maximize over not-K    invariant -> minimize over not-K
Mode required_mode(QueryKind kind);
bool requires_complement(QueryKind kind);

struct SetQuery {
  QueryKind kind = QueryKind::max_reach;
  double horizon = 0.0;
};

struct SolveConfig {
  SystemModel system;
  TargetSet target;
  Grid grid;
  double dt = 0.0;
  int recursions = 0;
  std::vector<int> control_counts;
  Mode mode = Mode::minimize;
  /// Worker count; 0 defers to REACHKIT_THREADS, then to all cores.
  unsigned threads = 0;

  /// Throws UsageError on dimension mismatches, dt <= 0 or negative recursions.
  void validate() const;
};

/// Diagnostics gathered while solving.
struct SolveStats {
  /// Successor states that fell outside the domain and were clamped.
  std::uint64_t clamped_lookups = 0;
  /// Sum of all node values after each step, in node order.
  std::vector<double> step_sums;
  double wall_seconds = 0.0;
  unsigned threads = 1;
};

/// Resolves a requested worker count: nonzero is taken as is, zero reads
/// REACHKIT_THREADS (where 0 again means all cores).
unsigned resolve_threads(unsigned requested);

/// Called after each completed recursion with the current field.
using StepObserver = std::function<void(const ValueField&)>;

/// One dynamic-programming update: for every node x,
///   opt_u [ cost(x) dt + W(F(x, u)) ]
/// with F the frozen-in-target Euler step and W the multilinear interpolant
/// of `field`. Returns a new field with k + 1.
ValueField recursion_step(const ValueField& field, const SolveConfig& config,
                          SolveStats* stats = nullptr);

/// `config.recursions` updates starting from the zero field. Output is
/// bitwise independent of the worker count.
ValueField solve(const SolveConfig& config, SolveStats* stats = nullptr,
                 const StepObserver& observer = {});

/// Level set of a field for a query. `target` is the set the field was solved
/// against (K for reach kinds, its complement for viable/invariant). Throws
/// UsageError when the field mode does not fit the kind, when a viable or
/// invariant query gets a non-complement target, or when T >= k dt.
NodeMask extract_set(const ValueField& field, const SetQuery& query, const TargetSet& target);

/// Smallest m with m * dt > horizon, i.e. ceil(horizon / dt) + 1, tolerant of
/// horizons that are an integer multiple of dt up to rounding.
int recursions_for_horizon(double horizon, double dt);

/// Number of dt steps that fit in a horizon, same rounding tolerance.
int steps_for_horizon(double horizon, double dt);

struct QueryResult {
  ValueField field;
  NodeMask mask;
  SolveStats stats;
  /// The target the field was actually solved against.
  TargetSet solved_target;
};

/// Picks mode and effective target for the query kind, solves with
/// recursions_for_horizon, then extracts the set.
QueryResult solve_query(const SystemModel& system, const TargetSet& target, const SetQuery& query,
                        const Grid& grid, double dt, std::vector<int> control_counts,
                        unsigned threads = 0);

}  // namespace reachkit
