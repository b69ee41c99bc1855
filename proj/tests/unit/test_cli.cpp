#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "doctest.h"
#include "reachkit/error.hpp"
#include "reachkit/format.hpp"

using namespace reachkit;
using namespace reachkit::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json single_integrator_doc() {
  return json::parse(R"({
    "system": {"name": "single_integrator"},
    "target": {"variant": "box", "bounds": [[-0.2, 0.2]]},
    "domain": [[-1.0, 1.0]],
    "grid": [41],
    "dt": 0.05,
    "query": {"kind": "max_reach", "horizon": 0.3},
    "controls": [2],
    "output": "si"
  })");
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("reachkit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const json& doc) {
  const auto path = (dir / "run.json").string();
  std::ofstream(path) << doc.dump(2);
  return path;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("config round-trips through JSON") {
  const auto c = parse_config(single_integrator_doc());
  CHECK(c.system == "single_integrator");
  CHECK(c.grid == std::vector<std::size_t>{41});
  CHECK(c.query.kind == QueryKind::max_reach);
  CHECK_FALSE(c.recursions.has_value());
  CHECK(effective_recursions(c) == 7);
  CHECK(parse_config(to_json(c)) == c);

  auto doc = single_integrator_doc();
  doc["target"] = json::parse(R"({"variant": "union", "members": [
      {"variant": "box", "bounds": [[-0.2, 0.0]]},
      {"variant": "complement", "inner": {"variant": "box", "bounds": [[-0.9, 0.9]]}}]})");
  doc["system"]["params"] = json::object();
  doc["recursions"] = 9;
  const auto u = parse_config(doc);
  CHECK(parse_config(to_json(u)) == u);
  CHECK(effective_recursions(u) == 9);
  const auto t = build_target(u);
  CHECK(t.contains(std::vector<double>{-0.1}));
  CHECK(t.contains(std::vector<double>{0.95}));
  CHECK_FALSE(t.contains(std::vector<double>{0.5}));
}

TEST_CASE("config hash tracks every field") {
  const auto base = parse_config(single_integrator_doc());
  const auto h = config_hash(base);
  CHECK(config_hash(parse_config(single_integrator_doc())) == h);
  CHECK(hex64(h).size() == 16);

  auto changed = [&](auto&& edit) {
    auto doc = single_integrator_doc();
    edit(doc);
    return config_hash(parse_config(doc)) != h;
  };
  CHECK(changed([](json& d) { d["dt"] = 0.025; }));
  CHECK(changed([](json& d) { d["grid"] = {43}; }));
  CHECK(changed([](json& d) { d["query"]["horizon"] = 0.35; }));
  CHECK(changed([](json& d) { d["query"]["kind"] = "min_reach"; }));
  CHECK(changed([](json& d) { d["controls"] = {3}; }));
  CHECK(changed([](json& d) { d["target"]["bounds"] = {{-0.25, 0.2}}; }));
  CHECK(changed([](json& d) { d["domain"] = {{-1.5, 1.0}}; }));
  CHECK(changed([](json& d) { d["output"] = "other"; }));
  CHECK(changed([](json& d) { d["recursions"] = 12; }));
}

TEST_CASE("config errors name the key") {
  auto expect_key = [](const json& doc, const std::string& key) {
    try {
      (void)parse_config(doc);
      FAIL("expected ConfigError for " << key);
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(key) != std::string::npos, e.what());
    }
  };
  auto doc = single_integrator_doc();
  doc.erase("dt");
  expect_key(doc, "dt");
  doc = single_integrator_doc();
  doc["dt"] = -1;
  expect_key(doc, "dt");
  doc = single_integrator_doc();
  doc["colour"] = 1;
  expect_key(doc, "colour");
  doc = single_integrator_doc();
  doc["grid"] = {41, 41};
  expect_key(doc, "grid");
  doc = single_integrator_doc();
  doc["query"]["kind"] = "sometimes";
  expect_key(doc, "query");
  doc = single_integrator_doc();
  doc["target"]["variant"] = "sphere";
  expect_key(doc, "target");
}

TEST_CASE("solve, query and export through the command layer") {
  const auto dir = scratch_dir("cli");
  const auto cfg = write_config(dir, single_integrator_doc());
  const std::string prefix = (dir / "out" / "si").string();
  std::ostringstream out, err;

  REQUIRE(cmd_solve({cfg, 1, prefix}, out, err) == kOk);
  const auto field = load_field(field_path_for(prefix));
  CHECK(field.k == 7);

  std::ifstream mf(manifest_path_for(prefix));
  std::stringstream manifest;
  manifest << mf.rdbuf();
  CHECK(manifest.str().find("config_hash " + hex64(config_hash(load_config(cfg)))) !=
        std::string::npos);
  CHECK(manifest.str().find("digest ") != std::string::npos);

  SUBCASE("query") {
    std::ostringstream q;
    CHECK(cmd_query({field_path_for(prefix), {0.4}, 0.3}, q, err) == kOk);
    CHECK(q.str().find("member true") != std::string::npos);
    std::ostringstream far;
    CHECK(cmd_query({field_path_for(prefix), {0.9}, 0.3}, far, err) == kOk);
    CHECK(far.str().find("member false") != std::string::npos);
    std::ostringstream sink;
    CHECK(cmd_query({field_path_for(prefix), {0.4}, 0.36}, sink, err) == kUsage);
    CHECK(cmd_query({field_path_for(prefix), {0.4, 0.1}, 0.1}, sink, err) == kUsage);
    CHECK(cmd_query({(dir / "missing.field").string(), {0.4}, 0.1}, sink, err) == kUsage);
  }

  SUBCASE("vtk export") {
    std::ostringstream sink;
    const auto path = (dir / "si.vtk").string();
    REQUIRE(cmd_export({field_path_for(prefix), "vtk", {}, {}, path}, sink, err) == kOk);
    std::ifstream in(path);
    std::stringstream vtk;
    vtk << in.rdbuf();
    CHECK(vtk.str().find("DIMENSIONS 41 1 1") != std::string::npos);
    CHECK(vtk.str().find("POINT_DATA 41") != std::string::npos);
    CHECK(cmd_export({field_path_for(prefix), "png", {}, {}, path}, sink, err) == kUsage);
  }
}

TEST_CASE("csv slices reparse bit-exactly") {
  const Grid g({{-0.4, 0.4}, {-0.75, 0.75}, {-0.75, 0.75}}, {5, 4, 3});
  ValueField f = ValueField::zeros(g, Mode::minimize, 0.01);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 0.01 * i / 7.0;

  std::ostringstream csv;
  write_csv_slice(csv, f, 1, 2);
  const std::string text = csv.str();
  CHECK(text.rfind("x,y,value\n", 0) == 0);
  CHECK(count_lines(text) == 1 + 5 * 3);

  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::size_t matched = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const double x = parse_double(line.substr(0, c1));
    const double y = parse_double(line.substr(c1 + 1, c2 - c1 - 1));
    const double v = parse_double(line.substr(c2 + 1));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t k = 0; k < 3; ++k)
        if (g.coordinate(0, i) == x && g.coordinate(2, k) == y) {
          const std::size_t idx[3] = {i, 2, k};
          CHECK(std::memcmp(&v, &f.values[g.flatten(idx)], sizeof v) == 0);
          ++matched;
        }
  }
  CHECK(matched == 15);

  std::ostringstream sink;
  CHECK_THROWS_AS(write_csv_slice(sink, f, 1, 4), UsageError);
  CHECK_THROWS_AS(write_csv_slice(sink, f, std::nullopt, std::nullopt), UsageError);
}

TEST_CASE("voxel-mask targets load relative to the config") {
  const auto dir = scratch_dir("voxel");
  VoxelMask m{{{-1, 1}}, {4}, {0, 1, 1, 0}};
  save_voxel_mask((dir / "k.mask").string(), m);
  auto doc = single_integrator_doc();
  doc["target"] = json::parse(R"({"variant": "voxel_mask", "mask_file": "k.mask"})");
  const auto c = load_config(write_config(dir, doc));
  const auto t = build_target(c);
  CHECK(t.kind() == TargetSet::Kind::voxel_mask);
  CHECK(t.mask() == m);
  CHECK(t.contains(std::vector<double>{0.3}));
  CHECK_FALSE(t.contains(std::vector<double>{0.7}));
}

TEST_CASE("verify") {
  const auto dir = scratch_dir("verify");
  auto doc = single_integrator_doc();
  doc["output"] = (dir / "si").string();
  const auto cfg = write_config(dir, doc);
  std::ostringstream out, err;

  SUBCASE("zero samples") {
    CHECK(cmd_verify({cfg, 0, 1, 1, {}}, out, err) == kOk);
    CHECK(out.str().find("0 sampled") != std::string::npos);
  }
  SUBCASE("agreement on a small problem") {
    const auto csv = (dir / "v.csv").string();
    REQUIRE(cmd_verify({cfg, 20, 7, 1, csv}, out, err) == kOk);
    std::ifstream in(csv);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().rfind("node,solver,oracle,agree\n", 0) == 0);
    CHECK(count_lines(text.str()) == 21);
    CHECK(out.str().find("20 sampled") != std::string::npos);
  }
  SUBCASE("too many sequences") {
    doc["query"]["horizon"] = 5.0;
    doc["controls"] = {5};
    doc["dt"] = 0.1;
    CHECK(cmd_verify({write_config(dir, doc), 5, 1, 1, {}}, out, err) == kUsage);
  }
  SUBCASE("unsupported kind") {
    doc["query"]["kind"] = "viable";
    CHECK(cmd_verify({write_config(dir, doc), 5, 1, 1, {}}, out, err) == kUsage);
  }
}
