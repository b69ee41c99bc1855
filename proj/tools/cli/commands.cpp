#include "commands.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "reachkit/error.hpp"
#include "reachkit/format.hpp"
#include "reachkit/oracle.hpp"
#include "reachkit/solver.hpp"

namespace reachkit::cli {

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kModel;
  }
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

void write_atomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp + "'");
    out << contents;
    if (!out) throw UsageError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t bits_of(double x) {
  std::uint64_t b;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

std::string manifest_text(const RunConfig& config, const SolveConfig& sc, const SolveStats& stats) {
  std::ostringstream m;
  m << "reachkit-manifest 1\n";
  m << "config_hash " << hex64(config_hash(config)) << '\n';
  m << "system " << config.system << '\n';
  m << "query " << to_string(config.query.kind) << ' ' << format_double(config.query.horizon) << '\n';
  m << "mode " << to_string(sc.mode) << '\n';
  m << "dt " << format_double(sc.dt) << '\n';
  m << "recursions " << sc.recursions << '\n';
  m << "nodes " << sc.grid.node_count() << '\n';
  m << "threads " << stats.threads << '\n';
  m << "wall_seconds " << format_double(stats.wall_seconds) << '\n';
  m << "clamped_lookups " << stats.clamped_lookups << '\n';
  std::uint64_t digest = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < stats.step_sums.size(); ++i) {
    const auto b = bits_of(stats.step_sums[i]);
    m << "step_sum " << (i + 1) << ' ' << format_double(stats.step_sums[i]) << ' ' << hex64(b)
      << '\n';
    for (int k = 0; k < 8; ++k) {
      digest ^= (b >> (8 * k)) & 0xffu;
      digest *= 0x100000001b3ull;
    }
  }
  m << "digest " << hex64(digest) << '\n';
  return m.str();
}

bool member_for(QueryKind kind, double value, double horizon) {
  return requires_complement(kind) ? value >= horizon : value <= horizon;
}

}  // namespace

std::string field_path_for(const std::string& prefix) { return prefix + ".field"; }
std::string manifest_path_for(const std::string& prefix) { return prefix + ".manifest"; }

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(opts.config_path);
    const SolveConfig sc = build_solve_config(config, opts.threads);
    if (sc.recursions > 0 && !(config.query.horizon < static_cast<double>(sc.recursions) * sc.dt))
      err << "warning: recursions * dt does not exceed the query horizon; the field cannot "
             "answer that query\n";

    SolveStats stats;
    const ValueField field = solve(sc, &stats);

    const std::string prefix = opts.output.value_or(config.output);
    ensure_parent_dir(prefix);
    const std::map<std::string, std::string> meta = {
        {"kind", to_string(config.query.kind)},
        {"horizon", format_double(config.query.horizon)},
        {"system", config.system},
        {"config_hash", hex64(config_hash(config))}};
    save_field(field_path_for(prefix), field, meta);
    write_atomically(manifest_path_for(prefix), manifest_text(config, sc, stats));

    out << "wrote " << field_path_for(prefix) << " (k=" << field.k << ", " << sc.grid.node_count()
        << " nodes, " << stats.clamped_lookups << " clamped lookups, "
        << format_double(stats.wall_seconds) << " s)\n";
    return kOk;
  });
}

int cmd_query(const QueryOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::map<std::string, std::string> meta;
    const ValueField field = load_field(opts.field_path, &meta);
    if (!meta.contains("kind")) throw UsageError("field file carries no query kind");
    const QueryKind kind = parse_query_kind(meta.at("kind"));
    if (opts.state.size() != field.grid.dim())
      throw UsageError("state has " + std::to_string(opts.state.size()) +
                       " components, field has " + std::to_string(field.grid.dim()));
    if (!(opts.horizon >= 0)) throw UsageError("horizon must be >= 0");
    if (!(opts.horizon < field.horizon()))
      throw UsageError("horizon T = " + format_double(opts.horizon) +
                       " must be strictly below k*dt = " + format_double(field.horizon()) +
                       " for this field");
    const double value = interpolate(field, opts.state);
    out << "state " << format_vector(opts.state) << '\n';
    out << "in_domain " << (field.grid.in_domain(opts.state) ? "true" : "false") << '\n';
    out << "value " << format_double(value) << '\n';
    out << "kind " << to_string(kind) << '\n';
    out << "horizon " << format_double(opts.horizon) << '\n';
    out << "member " << (member_for(kind, value, opts.horizon) ? "true" : "false") << '\n';
    return kOk;
  });
}

void write_vtk(std::ostream& out, const ValueField& field) {
  const Grid& g = field.grid;
  if (g.dim() > 3) throw UsageError("VTK export supports at most 3 dimensions");
  std::array<std::size_t, 3> dims{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0}, spacing{1, 1, 1};
  for (std::size_t a = 0; a < g.dim(); ++a) {
    dims[a] = g.dims()[a];
    origin[a] = g.bounds()[a].lo;
    spacing[a] = g.spacing(a);
  }
  out << "# vtk DataFile Version 3.0\n";
  out << "reachkit value field mode=" << to_string(field.mode) << " k=" << field.k
      << " dt=" << format_double(field.dt) << '\n';
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << dims[0] << ' ' << dims[1] << ' ' << dims[2] << '\n';
  out << "ORIGIN " << format_double(origin[0]) << ' ' << format_double(origin[1]) << ' '
      << format_double(origin[2]) << '\n';
  out << "SPACING " << format_double(spacing[0]) << ' ' << format_double(spacing[1]) << ' '
      << format_double(spacing[2]) << '\n';
  out << "POINT_DATA " << g.node_count() << '\n';
  out << "SCALARS value double 1\n";
  out << "LOOKUP_TABLE default\n";
  // VTK runs x fastest; storage runs the last axis fastest.
  std::array<std::size_t, 3> stride{0, 0, 0};
  for (std::size_t a = 0; a < g.dim(); ++a) stride[a] = g.strides()[a];
  for (std::size_t k = 0; k < dims[2]; ++k)
    for (std::size_t j = 0; j < dims[1]; ++j)
      for (std::size_t i = 0; i < dims[0]; ++i)
        out << format_double(field.values[i * stride[0] + j * stride[1] + k * stride[2]]) << '\n';
}

void write_csv_slice(std::ostream& out, const ValueField& field, std::optional<std::size_t> axis,
                     std::optional<std::size_t> index) {
  const Grid& g = field.grid;
  std::size_t ax = 0, ay = 1;
  std::size_t fixed_axis = 0, fixed_index = 0;
  if (g.dim() == 3) {
    if (!axis || !index) throw UsageError("csv_slice of a 3-D field needs --axis and --index");
    if (*axis > 2) throw UsageError("axis must be 0, 1 or 2");
    if (*index >= g.dims()[*axis])
      throw UsageError("index " + std::to_string(*index) + " out of range for axis " +
                       std::to_string(*axis));
    fixed_axis = *axis;
    fixed_index = *index;
    std::vector<std::size_t> free;
    for (std::size_t a = 0; a < 3; ++a)
      if (a != fixed_axis) free.push_back(a);
    ax = free[0];
    ay = free[1];
  } else if (g.dim() != 2) {
    throw UsageError("csv_slice needs a 2-D or 3-D field");
  }
  out << "x,y,value\n";
  std::vector<std::size_t> idx(g.dim(), 0);
  if (g.dim() == 3) idx[fixed_axis] = fixed_index;
  for (std::size_t i = 0; i < g.dims()[ax]; ++i) {
    for (std::size_t j = 0; j < g.dims()[ay]; ++j) {
      idx[ax] = i;
      idx[ay] = j;
      out << format_double(g.coordinate(ax, i)) << ',' << format_double(g.coordinate(ay, j)) << ','
          << format_double(field.values[g.flatten(idx)]) << '\n';
    }
  }
}

int cmd_export(const ExportOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.format != "vtk" && opts.format != "csv_slice")
      throw UsageError("format must be vtk or csv_slice");
    const ValueField field = load_field(opts.field_path);
    std::ostringstream body;
    std::string path;
    if (opts.format == "vtk") {
      write_vtk(body, field);
      path = opts.output.value_or(opts.field_path + ".vtk");
    } else {
      write_csv_slice(body, field, opts.axis, opts.index);
      path = opts.output.value_or(opts.field_path + ".slice_a" +
                                  std::to_string(opts.axis.value_or(0)) + "_i" +
                                  std::to_string(opts.index.value_or(0)) + ".csv");
    }
    ensure_parent_dir(path);
    write_atomically(path, body.str());
    out << "wrote " << path << '\n';
    return kOk;
  });
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(opts.config_path);
    if (config.query.kind != QueryKind::max_reach && config.query.kind != QueryKind::min_reach)
      throw UsageError("verify supports max_reach and min_reach queries only");
    const int steps = steps_for_horizon(config.query.horizon, config.dt);
    const double sequences = sequence_count(config.controls, steps);
    if (sequences > kMaxSequences)
      throw UsageError("exhaustive oracle would enumerate " + format_double(sequences) +
                       " sequences per node (limit 1e7); reduce the horizon or control counts");

    const SolveConfig sc = build_solve_config(config, opts.threads);
    const ValueField field = solve(sc);
    const NodeMask labels = extract_set(field, config.query, sc.target);
    const NodeMask band = boundary_band(sc.grid, labels);

    std::vector<std::size_t> nodes;
    const std::size_t n = sc.grid.node_count();
    if (opts.samples >= n) {
      nodes.resize(n);
      std::iota(nodes.begin(), nodes.end(), std::size_t{0});
    } else if (opts.samples > 0) {
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), std::size_t{0});
      std::mt19937_64 rng(opts.seed);
      std::sample(all.begin(), all.end(), std::back_inserter(nodes), opts.samples, rng);
    }

    std::ostringstream csv;
    csv << "node,solver,oracle,agree\n";
    std::size_t agree_all = 0, off_band = 0, agree_off_band = 0;
    for (std::size_t node : nodes) {
      const auto x = sc.grid.node_coordinate(node);
      const bool oracle = brute_classify(sc.system, sc.target, x, config.query.horizon, sc.dt,
                                         config.controls, config.query.kind);
      const bool solver = labels[node] != 0;
      const bool agree = oracle == solver;
      agree_all += agree;
      if (!band[node]) {
        ++off_band;
        agree_off_band += agree;
      }
      csv << node << ',' << int(solver) << ',' << int(oracle) << ',' << int(agree) << '\n';
    }
    const std::string path = opts.output.value_or(config.output + ".verify.csv");
    ensure_parent_dir(path);
    write_atomically(path, csv.str());

    auto pct = [](std::size_t a, std::size_t b) { return b ? 100.0 * double(a) / double(b) : 100.0; };
    if (nodes.empty()) {
      out << "0 sampled\n";
    } else {
      std::ostringstream s;
      s.setf(std::ios::fixed);
      s.precision(2);
      s << nodes.size() << " sampled, " << off_band << " off-boundary, agreement "
        << pct(agree_off_band, off_band) << "% off-boundary (" << agree_off_band << '/' << off_band
        << "), " << pct(agree_all, nodes.size()) << "% overall";
      out << s.str() << '\n';
    }
    out << "csv " << path << '\n';
    return kOk;
  });
}

}  // namespace reachkit::cli
