#include <sstream>

#include "doctest.h"
#include "reachkit/error.hpp"
#include "reachkit/targets.hpp"
#include "test_support.hpp"

using namespace reachkit;
using reachkit::testing::uniform;
using reachkit::testing::uniform_state;

namespace {

const std::vector<Interval> kFlightBox{{-0.05, 0.05}, {-0.1, 0.1}, {-0.1, 0.1}};
const std::vector<Interval> kGroundBox{{22, 48}, {-18, 18}, {-0.4, 0.4}};

}  // namespace

TEST_CASE("box membership is closed") {
  const auto k = TargetSet::box(kFlightBox);
  CHECK(k.kind() == TargetSet::Kind::box);
  CHECK(k.contains(std::vector<double>{0, 0, 0}));
  CHECK(k.contains(std::vector<double>{0.05, 0.1, 0.1}));
  CHECK(k.contains(std::vector<double>{-0.05, -0.1, -0.1}));
  CHECK_FALSE(k.contains(std::vector<double>{0.0500001, 0, 0}));
  CHECK_THROWS_AS(k.contains(std::vector<double>{0, 0}), UsageError);
  CHECK_THROWS_AS(TargetSet::box({{1, 0}}), UsageError);
}

TEST_CASE("complement") {
  const auto k = TargetSet::box(kGroundBox);
  const auto not_k = complement_within(k);
  CHECK(not_k.kind() == TargetSet::Kind::complement);
  CHECK_FALSE(not_k.contains(std::vector<double>{35, 0, 0}));
  CHECK(not_k.contains(std::vector<double>{21, 0, 0}));
  CHECK_FALSE(complement_within(TargetSet::box(kFlightBox)).contains(std::vector<double>{0, 0, 0}));

  SUBCASE("involution on random states") {
    const auto twice = complement_within(not_k);
    const std::vector<Interval> sample{{15, 55}, {-25, 25}, {-0.6, 0.6}};
    for (int i = 0; i < 1000; ++i) {
      const auto s = uniform_state(sample);
      CHECK(twice.contains(s) == k.contains(s));
      CHECK(not_k.contains(s) != k.contains(s));
    }
  }
}

TEST_CASE("union membership is the OR of its members") {
  const auto a = TargetSet::box({{0, 1}, {0, 1}});
  const auto b = TargetSet::box({{0.5, 2}, {-1, 0.5}});
  const auto u = TargetSet::union_of({a, b});
  for (int i = 0; i < 1000; ++i) {
    const auto s = uniform_state({{-1, 3}, {-2, 2}});
    CHECK(u.contains(s) == (a.contains(s) || b.contains(s)));
  }
  CHECK_THROWS_AS(TargetSet::union_of({}), UsageError);
  CHECK_THROWS_AS(TargetSet::union_of({a, TargetSet::box({{0, 1}})}), UsageError);
}

TEST_CASE("voxel targets") {
  const std::vector<Interval> cube{{0, 1}, {0, 1}, {0, 1}};

  SUBCASE("single cell") {
    const std::vector<std::vector<std::size_t>> marked{{0, 0, 0}};
    const auto t = voxel_from_cells(cube, {2, 2, 2}, marked);
    CHECK(t.contains(std::vector<double>{0.1, 0.1, 0.1}));
    CHECK_FALSE(t.contains(std::vector<double>{0.9, 0.9, 0.9}));
    // half-open: 0.5 belongs to the upper cell
    CHECK_FALSE(t.contains(std::vector<double>{0.5, 0.1, 0.1}));
    CHECK(t.contains(std::vector<double>{0.4999999, 0.1, 0.1}));
  }
  SUBCASE("empty mask") {
    const auto t = voxel_from_cells(cube, {3, 3, 3}, std::vector<std::vector<std::size_t>>{});
    for (int i = 0; i < 200; ++i) CHECK_FALSE(t.contains(uniform_state(cube)));
  }
  SUBCASE("full mask") {
    std::vector<std::vector<std::size_t>> all;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k) all.push_back({i, j, k});
    const auto t = voxel_from_cells(cube, {2, 2, 2}, all);
    for (int i = 0; i < 200; ++i) CHECK(t.contains(uniform_state(cube)));
    CHECK(t.contains(std::vector<double>{1, 1, 1}));  // last cell closed above
    CHECK(t.contains(std::vector<double>{0, 0, 0}));
    CHECK_FALSE(t.contains(std::vector<double>{1.0000001, 0.5, 0.5}));
    CHECK_FALSE(t.contains(std::vector<double>{-1e-9, 0.5, 0.5}));
  }
  SUBCASE("out-of-range cell index") {
    const std::vector<std::vector<std::size_t>> bad{{0, 2, 0}};
    CHECK_THROWS_AS(voxel_from_cells(cube, {2, 2, 2}, bad), UsageError);
  }
  SUBCASE("states in the same cell agree") {
    std::vector<std::vector<std::size_t>> marked;
    for (std::size_t i = 0; i < 5; ++i) marked.push_back({i, (i * 3) % 5, (i * 2) % 5});
    const auto t = voxel_from_cells(cube, {5, 5, 5}, marked);
    const auto& mask = t.mask();
    for (int i = 0; i < 500; ++i) {
      const auto s = uniform_state(cube);
      const auto cell = mask.cell_of(s);
      // Jitter within the same cell.
      std::vector<double> s2(3);
      for (int a = 0; a < 3; ++a) {
        const double w = 0.2;
        const double lo = std::floor(s[a] / w) * w;
        s2[a] = lo + uniform(0.01, 0.19);
      }
      if (mask.cell_of(s2) == cell) CHECK(t.contains(s2) == t.contains(s));
    }
  }
}

TEST_CASE("voxel mask text format") {
  VoxelMask m;
  m.bounds = {{20, 50}, {-20, 20}, {-0.5, 0.5}};
  m.cells = {3, 2, 4};
  m.bits = {1, 0, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 0, 1, 0};

  std::ostringstream out;
  write_voxel_mask(out, m);
  const std::string text = out.str();
  CHECK(text.rfind("dims 3 2 4\nbounds 20 50 -20 20 -0.5 0.5\n1001\n", 0) == 0);

  std::istringstream in(text);
  const auto back = read_voxel_mask(in);
  CHECK(back == m);
  std::ostringstream again;
  write_voxel_mask(again, back);
  CHECK(again.str() == text);

  std::istringstream short_row("dims 2 2\nbounds 0 1 0 1\n10\n1\n");
  CHECK_THROWS_AS(read_voxel_mask(short_row), ConfigError);
  std::istringstream bad_char("dims 2 2\nbounds 0 1 0 1\n10\n1x\n");
  CHECK_THROWS_AS(read_voxel_mask(bad_char), ConfigError);
  std::istringstream missing_rows("dims 2 2\nbounds 0 1 0 1\n10\n");
  CHECK_THROWS_AS(read_voxel_mask(missing_rows), ConfigError);
}
