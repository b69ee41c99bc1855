#include "reachkit/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "reachkit/error.hpp"
#include "reachkit/format.hpp"

namespace reachkit {

std::string to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::max_reach: return "max_reach";
    case QueryKind::min_reach: return "min_reach";
    case QueryKind::viable: return "viable";
    case QueryKind::invariant: return "invariant";
  }
  return "?";
}

QueryKind parse_query_kind(const std::string& text) {
  if (text == "max_reach") return QueryKind::max_reach;
  if (text == "min_reach") return QueryKind::min_reach;
  if (text == "viable") return QueryKind::viable;
  if (text == "invariant") return QueryKind::invariant;
  throw UsageError("query kind must be one of max_reach, min_reach, viable, invariant; got '" +
                   text + "'");
}

Mode required_mode(QueryKind kind) {
  return (kind == QueryKind::max_reach || kind == QueryKind::invariant) ? Mode::minimize
                                                                         : Mode::maximize;
}

bool requires_complement(QueryKind kind) {
  return kind == QueryKind::viable || kind == QueryKind::invariant;
}

void SolveConfig::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw UsageError("dt must be positive and finite");
  if (recursions < 0) throw UsageError("recursions must be >= 0");
  if (system.dim() != grid.dim())
    throw UsageError("system '" + system.name() + "' has dimension " +
                     std::to_string(system.dim()) + " but the grid has " +
                     std::to_string(grid.dim()));
  if (target.dim() != grid.dim())
    throw UsageError("target dimension " + std::to_string(target.dim()) +
                     " does not match grid dimension " + std::to_string(grid.dim()));
  if (control_counts.size() != system.control_dim())
    throw UsageError("control counts: expected " + std::to_string(system.control_dim()) +
                     " entries, got " + std::to_string(control_counts.size()));
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("REACHKIT_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct StepContext {
  const Grid& grid;
  const SystemModel& system;
  const std::vector<Control>& controls;
  const NodeMask& in_target;
  double dt;
  /// Cost of one step outside the target, in the units the values are kept in.
  double step_cost;
  Mode mode;
};

struct ChunkResult {
  std::uint64_t clamped = 0;
  std::exception_ptr error;
};

std::string describe_node(const StepContext& ctx, std::size_t node, std::span<const double> x,
                          std::span<const double> u) {
  std::vector<std::size_t> idx(ctx.grid.dim());
  ctx.grid.unflatten(node, idx);
  std::string where;
  for (auto i : idx) where += (where.empty() ? "" : ",") + std::to_string(i);
  return "system '" + ctx.system.name() + "' at node (" + where + ") state " + format_vector(x) +
         " control " + format_vector(u);
}

void update_nodes(const StepContext& ctx, std::span<const double> prev, std::span<double> next,
                  std::size_t begin, std::size_t end, ChunkResult& result) {
  const std::size_t d = ctx.grid.dim();
  const Interpolator interp(ctx.grid, prev);
  std::array<double, kMaxDim> x{}, succ{}, deriv{};
  const std::span<double> xs(x.data(), d), ss(succ.data(), d), ds(deriv.data(), d);
  const bool minimize = ctx.mode == Mode::minimize;

  for (std::size_t node = begin; node < end; ++node) {
    ctx.grid.node_coordinate_into(node, xs);
    const bool frozen = ctx.in_target[node] != 0;
    const double cost = frozen ? 0.0 : ctx.step_cost;
    double best = minimize ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    for (const auto& u : ctx.controls) {
      if (frozen) {
        std::copy(xs.begin(), xs.end(), ss.begin());
      } else {
        try {
          ctx.system.eval_into(xs, u, ds);
        } catch (const ModelError& e) {
          throw ModelError(describe_node(ctx, node, xs, u) + ": " + e.what());
        }
        for (std::size_t a = 0; a < d; ++a) {
          if (!std::isfinite(deriv[a]))
            throw ModelError(describe_node(ctx, node, xs, u) + ": non-finite derivative");
        }
        euler_step_into(xs, ds, ctx.dt, ss);
      }
      bool clamped = false;
      const double v = cost + interp(ss, &clamped);
      result.clamped += clamped ? 1 : 0;
      if (minimize ? (v < best) : (v > best)) best = v;
    }
    next[node] = best;
  }
}

/// One update of `prev` into `next` over all nodes, split across workers.
/// Returns the clamped-lookup count.
std::uint64_t run_step(const StepContext& ctx, std::span<const double> prev,
                       std::span<double> next, unsigned threads) {
  const std::size_t n = ctx.grid.node_count();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  std::vector<ChunkResult> results(workers);

  auto run_chunk = [&](std::size_t w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    try {
      update_nodes(ctx, prev, next, begin, end, results[w]);
    } catch (...) {
      results[w].error = std::current_exception();
    }
  };

  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_chunk, w);
    run_chunk(0);
  }  // jthreads join here

  std::uint64_t clamped = 0;
  for (const auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
    clamped += r.clamped;
  }
  return clamped;
}

NodeMask target_nodes(const Grid& grid, const TargetSet& target) {
  NodeMask mask(grid.node_count());
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    grid.node_coordinate_into(i, x);
    mask[i] = target.contains_unchecked(x) ? 1 : 0;
  }
  return mask;
}

double value_sum(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

}  // namespace

ValueField recursion_step(const ValueField& field, const SolveConfig& config, SolveStats* stats) {
  config.validate();
  if (!(field.grid == config.grid)) throw UsageError("recursion_step: field grid differs from config");
  if (field.mode != config.mode) throw UsageError("recursion_step: field mode differs from config");
  if (field.values.size() != field.grid.node_count())
    throw UsageError("recursion_step: value count does not match grid");

  const auto controls = discretize_controls(config.system.control_bounds(), config.control_counts);
  const auto in_target = target_nodes(config.grid, config.target);
  const StepContext ctx{config.grid, config.system, controls,   in_target,
                        config.dt,   config.dt,     config.mode};

  ValueField out;
  out.grid = field.grid;
  out.mode = field.mode;
  out.dt = config.dt;
  out.k = field.k + 1;
  out.values.resize(field.values.size());
  const unsigned threads = resolve_threads(config.threads);
  const auto clamped = run_step(ctx, field.values, out.values, threads);
  if (stats) {
    stats->clamped_lookups += clamped;
    stats->step_sums.push_back(value_sum(out.values));
    stats->threads = threads;
  }
  return out;
}

ValueField solve(const SolveConfig& config, SolveStats* stats, const StepObserver& observer) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto controls = discretize_controls(config.system.control_bounds(), config.control_counts);
  const auto in_target = target_nodes(config.grid, config.target);
  const unsigned threads = resolve_threads(config.threads);

  // The recursion runs in units of dt (unit step cost) and is scaled once per
  // reported field. Scaling commutes with the min/max and with interpolation,
  // and keeps saturated nodes at exactly k * dt.
  const StepContext ctx{config.grid, config.system, controls,   in_target,
                        config.dt,   1.0,           config.mode};
  std::vector<double> prev(config.grid.node_count(), 0.0), next(prev.size());

  ValueField field = ValueField::zeros(config.grid, config.mode, config.dt);
  std::uint64_t clamped = 0;
  std::vector<double> sums;
  for (int k = 1; k <= config.recursions; ++k) {
    clamped += run_step(ctx, prev, next, threads);
    std::swap(prev, next);
    const bool last = k == config.recursions;
    if (observer || stats || last) {
      for (std::size_t i = 0; i < prev.size(); ++i) field.values[i] = prev[i] * config.dt;
      field.k = k;
      sums.push_back(value_sum(field.values));
      if (observer) observer(field);
    }
  }

  if (stats) {
    stats->clamped_lookups = clamped;
    stats->step_sums = std::move(sums);
    stats->threads = threads;
    stats->wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return field;
}

NodeMask extract_set(const ValueField& field, const SetQuery& query, const TargetSet& target) {
  const double t_bar = field.horizon();
  if (!(query.horizon >= 0))
    throw UsageError("query horizon must be >= 0, got " + format_double(query.horizon));
  if (!(query.horizon < t_bar))
    throw UsageError("query horizon T = " + format_double(query.horizon) +
                     " must be strictly below the computed horizon k*dt = " +
                     format_double(t_bar) +
                     " (the value function only characterizes sets for T < k*dt)");
  const Mode mode = required_mode(query.kind);
  const bool complement = requires_complement(query.kind);
  const bool target_is_complement = target.kind() == TargetSet::Kind::complement;
  // A reach query may legitimately target a complement (min_reach of not-K is
  // the dual of viable), so only the complement kinds constrain the target.
  if (field.mode != mode || (complement && !target_is_complement)) {
    throw UsageError(to_string(query.kind) + " sets need a " + to_string(mode) +
                     " field solved against " + (complement ? "the complement of K" : "K itself") +
                     "; got a " + to_string(field.mode) + " field solved against " +
                     (target_is_complement ? "a complement" : "a non-complement target"));
  }
  const Relation rel = complement ? Relation::greater_equal : Relation::less_equal;
  return level_mask(field, query.horizon, rel);
}

int steps_for_horizon(double horizon, double dt) {
  if (!(dt > 0)) throw UsageError("dt must be positive");
  if (!(horizon >= 0)) throw UsageError("horizon must be >= 0");
  const double r = horizon / dt;
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(r));
}

int recursions_for_horizon(double horizon, double dt) { return steps_for_horizon(horizon, dt) + 1; }

QueryResult solve_query(const SystemModel& system, const TargetSet& target, const SetQuery& query,
                        const Grid& grid, double dt, std::vector<int> control_counts,
                        unsigned threads) {
  const TargetSet effective = requires_complement(query.kind) ? complement_within(target) : target;
  SolveConfig cfg{system,
                  effective,
                  grid,
                  dt,
                  recursions_for_horizon(query.horizon, dt),
                  std::move(control_counts),
                  required_mode(query.kind),
                  threads};
  QueryResult r{ValueField{}, NodeMask{}, SolveStats{}, effective};
  r.field = solve(cfg, &r.stats);
  r.mask = extract_set(r.field, query, effective);
  return r;
}

}  // namespace reachkit
