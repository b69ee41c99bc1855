#include "reachkit/oracle.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "reachkit/error.hpp"

namespace reachkit {

TrajectoryResult simulate(const SystemModel& system, const TargetSet& target,
                          std::span<const double> s0, std::span<const Control> controls,
                          double dt) {
  TrajectoryResult r;
  r.controls.assign(controls.begin(), controls.end());
  r.states.reserve(controls.size() + 1);
  r.states.emplace_back(s0.begin(), s0.end());
  if (target.contains(s0)) r.first_hit_step = 0;
  for (std::size_t k = 0; k < controls.size(); ++k) {
    r.states.push_back(modified_step(system, target, r.states.back(), controls[k], dt));
    if (!r.first_hit_step && target.contains(r.states.back()))
      r.first_hit_step = static_cast<int>(k + 1);
  }
  return r;
}

double sequence_count(std::span<const int> control_counts, int steps) {
  double per_step = 1.0;
  for (int c : control_counts) per_step *= c;
  return std::pow(per_step, steps);
}

namespace {

// Depth-first search over the control tree. A branch stops as soon as its
// state is in K; since frozen states stay put, that decides every extension.
// exists=true answers "some sequence hits", false "every sequence hits".
bool search(const SystemModel& system, const TargetSet& target, const State& s,
            const std::vector<Control>& controls, double dt, int remaining, bool exists) {
  if (target.contains(s)) return true;
  if (remaining == 0) return false;
  for (const auto& u : controls) {
    const bool hit =
        search(system, target, modified_step(system, target, s, u, dt), controls, dt, remaining - 1,
               exists);
    if (exists && hit) return true;
    if (!exists && !hit) return false;
  }
  return !exists;
}

}  // namespace

bool brute_classify(const SystemModel& system, const TargetSet& target, std::span<const double> s0,
                    double horizon, double dt, std::span<const int> control_counts,
                    QueryKind kind) {
  if (kind != QueryKind::max_reach && kind != QueryKind::min_reach)
    throw UsageError("brute_classify supports max_reach and min_reach only");
  const int steps = steps_for_horizon(horizon, dt);
  const double count = sequence_count(control_counts, steps);
  if (count > kMaxSequences)
    throw UsageError("exhaustive search would enumerate " + std::to_string(count) +
                     " control sequences (limit 1e7); use fewer steps or controls");
  const auto controls = discretize_controls(system.control_bounds(), control_counts);
  return search(system, target, State(s0.begin(), s0.end()), controls, dt, steps,
                kind == QueryKind::max_reach);
}

double analytic_min_time(const std::string& name, std::span<const double> s0,
                         std::span<const double> half_widths) {
  if (name == "single_integrator") {
    if (s0.size() != 1 || half_widths.size() != 1)
      throw UsageError("single_integrator min time needs a 1-D state and target");
    return std::max(0.0, std::abs(s0[0]) - half_widths[0]);
  }
  if (name == "double_integrator") {
    if (s0.size() != 2 || half_widths.size() != 2)
      throw UsageError("double_integrator min time needs a 2-D state and target");
    if (half_widths[0] != 0.0 || half_widths[1] != 0.0)
      throw UsageError("double_integrator min time is only available for the origin point target");
    const double x = s0[0], v = s0[1];
    const double curve = -v * std::abs(v) / 2.0;
    if (x > curve) return v + 2.0 * std::sqrt(x + v * v / 2.0);
    if (x < curve) return -v + 2.0 * std::sqrt(-x + v * v / 2.0);
    return std::abs(v);
  }
  throw UsageError("no closed-form minimum time for system '" + name + "'");
}

NodeMask boundary_band(const Grid& grid, const NodeMask& labels) {
  if (labels.size() != grid.node_count()) throw UsageError("boundary_band: mask size mismatch");
  const std::size_t d = grid.dim();
  NodeMask band(labels.size(), 0);
  std::array<std::size_t, kMaxDim> idx{};
  std::array<int, kMaxDim> off{};
  std::size_t neighbours = 1;
  for (std::size_t a = 0; a < d; ++a) neighbours *= 3;

  for (std::size_t node = 0; node < labels.size(); ++node) {
    grid.unflatten(node, std::span(idx.data(), d));
    for (std::size_t n = 0; n < neighbours && !band[node]; ++n) {
      std::size_t rest = n;
      bool valid = true;
      std::size_t flat = 0;
      for (std::size_t a = 0; a < d; ++a) {
        off[a] = static_cast<int>(rest % 3) - 1;
        rest /= 3;
        const auto j = static_cast<long long>(idx[a]) + off[a];
        if (j < 0 || j >= static_cast<long long>(grid.dims()[a])) {
          valid = false;
          break;
        }
        flat += static_cast<std::size_t>(j) * grid.strides()[a];
      }
      if (valid && labels[flat] != labels[node]) band[node] = 1;
    }
  }
  return band;
}

}  // namespace reachkit
