#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reachkit/grid.hpp"
#include "reachkit/models.hpp"
#include "reachkit/solver.hpp"
#include "reachkit/targets.hpp"

// Ground-truth generators that do not go through the grid: direct simulation,
// exhaustive search over piecewise-constant control sequences, and classical
// closed-form minimum times.

namespace reachkit {

struct TrajectoryResult {
  std::vector<State> states;  // steps + 1 entries
  std::optional<int> first_hit_step;
  std::vector<Control> controls;
};

/// Iterates modified_step over `controls`, recording the first step whose
/// state lies in the target.
TrajectoryResult simulate(const SystemModel& system, const TargetSet& target,
                          std::span<const double> s0, std::span<const Control> controls,
                          double dt);

/// Largest number of control sequences brute_classify will enumerate.
inline constexpr double kMaxSequences = 1e7;

/// Exhaustive reachability verdict over all sequences drawn from the control
/// grid for steps_for_horizon(horizon, dt) steps.
///   max_reach: some sequence hits K by the last step;
///   min_reach: every sequence does.
/// Throws UsageError for other kinds or when the sequence count exceeds
/// kMaxSequences.
bool brute_classify(const SystemModel& system, const TargetSet& target, std::span<const double> s0,
                    double horizon, double dt, std::span<const int> control_counts,
                    QueryKind kind);

/// Number of sequences brute_classify would enumerate (as a double, may be huge).
double sequence_count(std::span<const int> control_counts, int steps);

/// Closed-form minimum time to the target with |u| <= 1.
///   single_integrator: target [-half_widths[0], half_widths[0]], time max(0, |s|-a).
///   double_integrator: point target at the origin (half_widths all zero),
///   bang-bang time with one switch on the curve x = -v|v|/2.
double analytic_min_time(const std::string& name, std::span<const double> s0,
                         std::span<const double> half_widths);

/// Nodes within one cell (Chebyshev distance 1) of a label change.
NodeMask boundary_band(const Grid& grid, const NodeMask& labels);

}  // namespace reachkit
