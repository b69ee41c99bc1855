#include "config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "reachkit/error.hpp"

namespace reachkit::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& required,
                const std::set<std::string>& optional = {}) {
  if (!obj.is_object()) fail(where.empty() ? "<root>" : where, "must be a table");
  const std::string prefix = where.empty() ? "" : where + ".";
  for (const auto& k : required) {
    if (!obj.contains(k)) fail(prefix + k, "is required");
  }
  for (const auto& [k, v] : obj.items()) {
    if (!required.contains(k) && !optional.contains(k)) fail(prefix + k, "unknown key");
  }
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  return x;
}

std::vector<Interval> get_intervals(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) fail(key, "must be a non-empty list of [lo, hi] pairs");
  std::vector<Interval> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string k = key + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != 2) fail(k, "must be a [lo, hi] pair");
    Interval iv{get_number(v[i][0], k), get_number(v[i][1], k)};
    if (!(iv.lo <= iv.hi)) fail(k, "lo must not exceed hi");
    out.push_back(iv);
  }
  return out;
}

json intervals_json(const std::vector<Interval>& v) {
  json a = json::array();
  for (const auto& iv : v) a.push_back({iv.lo, iv.hi});
  return a;
}

TargetSpec parse_target(const json& v, const std::string& key) {
  if (!v.is_object() || !v.contains("variant") || !v["variant"].is_string())
    fail(key + ".variant", "is required and must be a string");
  TargetSpec t;
  t.variant = v["variant"].get<std::string>();
  if (t.variant == "box") {
    check_keys(v, key, {"variant", "bounds"});
    t.box = get_intervals(v["bounds"], key + ".bounds");
  } else if (t.variant == "union") {
    check_keys(v, key, {"variant", "members"});
    const auto& m = v["members"];
    if (!m.is_array() || m.empty()) fail(key + ".members", "must be a non-empty list");
    for (std::size_t i = 0; i < m.size(); ++i)
      t.children.push_back(parse_target(m[i], key + ".members[" + std::to_string(i) + "]"));
  } else if (t.variant == "voxel_mask") {
    check_keys(v, key, {"variant", "mask_file"});
    if (!v["mask_file"].is_string() || v["mask_file"].get<std::string>().empty())
      fail(key + ".mask_file", "must be a non-empty path");
    t.mask_file = v["mask_file"].get<std::string>();
  } else if (t.variant == "complement") {
    check_keys(v, key, {"variant", "inner"});
    t.children.push_back(parse_target(v["inner"], key + ".inner"));
  } else {
    fail(key + ".variant", "must be one of box, union, voxel_mask, complement");
  }
  return t;
}

json target_json(const TargetSpec& t) {
  json j = {{"variant", t.variant}};
  if (t.variant == "box") {
    j["bounds"] = intervals_json(t.box);
  } else if (t.variant == "union") {
    j["members"] = json::array();
    for (const auto& c : t.children) j["members"].push_back(target_json(c));
  } else if (t.variant == "voxel_mask") {
    j["mask_file"] = t.mask_file;
  } else if (t.variant == "complement") {
    j["inner"] = target_json(t.children.at(0));
  }
  return j;
}

std::size_t target_dim(const TargetSpec& t) {
  if (t.variant == "box") return t.box.size();
  if (t.variant == "union" || t.variant == "complement") return target_dim(t.children.front());
  return 0;  // voxel masks: known only after loading
}

}  // namespace

RunConfig parse_config(const json& doc, std::string base_dir) {
  check_keys(doc, "", {"system", "target", "domain", "grid", "dt", "query", "output"},
             {"controls", "recursions"});
  RunConfig c;
  c.base_dir = std::move(base_dir);

  const auto& sys = doc["system"];
  check_keys(sys, "system", {"name"}, {"params"});
  if (!sys["name"].is_string()) fail("system.name", "must be a string");
  c.system = sys["name"].get<std::string>();
  const auto& names = builtin_system_names();
  if (std::find(names.begin(), names.end(), c.system) == names.end())
    fail("system.name", "unknown system '" + c.system + "'");
  if (sys.contains("params")) {
    const auto& p = sys["params"];
    if (!p.is_object()) fail("system.params", "must be a table of numbers");
    const auto preset = default_params(c.system);
    for (const auto& [k, v] : p.items()) {
      if (!preset.contains(k)) fail("system.params." + k, "not a parameter of " + c.system);
      c.params[k] = get_number(v, "system.params." + k);
    }
  }

  c.target = parse_target(doc["target"], "target");
  c.domain = get_intervals(doc["domain"], "domain");
  for (std::size_t i = 0; i < c.domain.size(); ++i) {
    if (!(c.domain[i].lo < c.domain[i].hi))
      fail("domain[" + std::to_string(i) + "]", "must have lo < hi");
  }

  const auto& g = doc["grid"];
  if (!g.is_array()) fail("grid", "must be a list of node counts");
  for (const auto& n : g) {
    if (!n.is_number_integer() || n.get<long long>() < 2) fail("grid", "node counts must be integers >= 2");
    c.grid.push_back(n.get<std::size_t>());
  }
  if (c.grid.size() != c.domain.size()) fail("grid", "needs one node count per domain dimension");
  if (c.grid.size() > kMaxDim) fail("grid", "at most " + std::to_string(kMaxDim) + " dimensions");

  c.dt = get_number(doc["dt"], "dt");
  if (!(c.dt > 0)) fail("dt", "must be positive");

  const auto& q = doc["query"];
  check_keys(q, "query", {"kind", "horizon"});
  if (!q["kind"].is_string()) fail("query.kind", "must be a string");
  try {
    c.query.kind = parse_query_kind(q["kind"].get<std::string>());
  } catch (const UsageError& e) {
    fail("query.kind", e.what());
  }
  c.query.horizon = get_number(q["horizon"], "query.horizon");
  if (!(c.query.horizon >= 0)) fail("query.horizon", "must be >= 0");

  if (!doc["output"].is_string() || doc["output"].get<std::string>().empty())
    fail("output", "must be a non-empty path prefix");
  c.output = doc["output"].get<std::string>();

  const std::size_t control_dim = builtin_system(c.system).control_dim();
  if (doc.contains("controls")) {
    const auto& u = doc["controls"];
    if (!u.is_array()) fail("controls", "must be a list of counts");
    for (const auto& n : u) {
      if (!n.is_number_integer() || n.get<long long>() < 1) fail("controls", "counts must be integers >= 1");
      c.controls.push_back(n.get<int>());
    }
    if (c.controls.size() != control_dim)
      fail("controls", "needs " + std::to_string(control_dim) + " entries for " + c.system);
  } else {
    c.controls.assign(control_dim, 5);
  }

  if (doc.contains("recursions")) {
    const auto& r = doc["recursions"];
    if (!r.is_number_integer() || r.get<long long>() < 0) fail("recursions", "must be an integer >= 0");
    c.recursions = r.get<int>();
  }

  const std::size_t d = c.domain.size();
  const std::size_t sys_dim = builtin_system(c.system).dim();
  if (sys_dim != d)
    fail("domain", "has " + std::to_string(d) + " dimensions but " + c.system + " has " +
                       std::to_string(sys_dim));
  const std::size_t td = target_dim(c.target);
  if (td != 0 && td != d)
    fail("target", "has " + std::to_string(td) + " dimensions, domain has " + std::to_string(d));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(doc, dir.empty() ? "." : dir);
}

json to_json(const RunConfig& c) {
  json j;
  j["system"] = {{"name", c.system}};
  if (!c.params.empty()) {
    json p = json::object();
    for (const auto& [k, v] : c.params) p[k] = v;
    j["system"]["params"] = p;
  }
  j["target"] = target_json(c.target);
  j["domain"] = intervals_json(c.domain);
  j["grid"] = c.grid;
  j["dt"] = c.dt;
  j["query"] = {{"kind", to_string(c.query.kind)}, {"horizon", c.query.horizon}};
  j["controls"] = c.controls;
  j["output"] = c.output;
  if (c.recursions) j["recursions"] = *c.recursions;
  return j;
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = digits[x & 0xf];
  return s;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

SystemModel build_system(const RunConfig& config) {
  ParamSet params = default_params(config.system);
  for (const auto& [k, v] : config.params) params[k] = v;
  return builtin_system(config.system, params);
}

TargetSet build_target(const TargetSpec& spec, const std::string& base_dir) {
  if (spec.variant == "box") return TargetSet::box(spec.box);
  if (spec.variant == "union") {
    std::vector<TargetSet> members;
    for (const auto& c : spec.children) members.push_back(build_target(c, base_dir));
    return TargetSet::union_of(std::move(members));
  }
  if (spec.variant == "voxel_mask")
    return TargetSet::voxel(load_voxel_mask(resolve_path(base_dir, spec.mask_file)));
  if (spec.variant == "complement")
    return complement_within(build_target(spec.children.at(0), base_dir));
  throw ConfigError("config key 'target.variant': unknown variant '" + spec.variant + "'");
}

TargetSet build_target(const RunConfig& config) {
  auto t = build_target(config.target, config.base_dir);
  if (t.dim() != config.domain.size())
    throw ConfigError("config key 'target': dimension " + std::to_string(t.dim()) +
                      " does not match domain dimension " + std::to_string(config.domain.size()));
  return t;
}

Grid build_grid(const RunConfig& config) { return Grid(config.domain, config.grid); }

int effective_recursions(const RunConfig& config) {
  return config.recursions ? *config.recursions
                           : recursions_for_horizon(config.query.horizon, config.dt);
}

SolveConfig build_solve_config(const RunConfig& config, unsigned threads) {
  const TargetSet k = build_target(config);
  const TargetSet effective = requires_complement(config.query.kind) ? complement_within(k) : k;
  SolveConfig sc{build_system(config), effective,
                 build_grid(config),   config.dt,
                 effective_recursions(config), config.controls,
                 required_mode(config.query.kind), threads};
  sc.validate();
  return sc;
}

}  // namespace reachkit::cli
