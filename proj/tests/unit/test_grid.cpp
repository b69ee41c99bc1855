#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "reachkit/error.hpp"
#include "reachkit/grid.hpp"
#include "test_support.hpp"

using namespace reachkit;
using reachkit::testing::reference_multilinear;
using reachkit::testing::uniform;
using reachkit::testing::uniform_state;

TEST_CASE("grid geometry") {
  const Grid g({{-2, 2}, {0, 1}, {-1, 3}}, {5, 3, 9});
  CHECK(g.dim() == 3);
  CHECK(g.node_count() == 135);
  CHECK(g.spacing(0) == 1.0);
  CHECK(g.spacing(1) == 0.5);
  CHECK(g.spacing(2) == 0.5);
  CHECK(g.strides() == std::vector<std::size_t>{27, 9, 1});
  CHECK(g.node_coordinate(std::vector<std::size_t>{4, 2, 8}) == std::vector<double>{2, 1, 3});
  CHECK_THROWS_AS(g.node_coordinate(std::vector<std::size_t>{5, 0, 0}), UsageError);
  CHECK_THROWS_AS(g.node_coordinate(std::size_t{135}), UsageError);

  std::vector<std::size_t> idx(3);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    g.unflatten(i, idx);
    CHECK(g.flatten(idx) == i);
  }
  CHECK(g.in_domain(std::vector<double>{2, 1, 3}));
  CHECK_FALSE(g.in_domain(std::vector<double>{2.0001, 1, 3}));
  CHECK(g.clamp(std::vector<double>{5, -1, 0.5}) == std::vector<double>{2, 0, 0.5});

  CHECK_THROWS_AS(Grid({{0, 1}}, {1}), UsageError);
  CHECK_THROWS_AS(Grid({{1, 1}}, {3}), UsageError);
  CHECK_THROWS_AS(Grid({{0, 1}}, {3, 3}), UsageError);
}

TEST_CASE("node coordinates hit the bounds and the midpoint exactly") {
  const Grid g({{-0.4, 0.4}}, {101});
  CHECK(g.coordinate(0, 0) == -0.4);
  CHECK(g.coordinate(0, 50) == 0.0);
  CHECK(g.coordinate(0, 100) == 0.4);
  for (std::size_t i = 0; i <= 100; ++i) {
    CHECK(g.coordinate(0, i) == -g.coordinate(0, 100 - i));
    if (i > 0) CHECK(g.coordinate(0, i) > g.coordinate(0, i - 1));
  }
  // The node at 0.2 on [-2, 2] must not drift outside a target ending at 0.2.
  CHECK(Grid({{-2, 2}}, {101}).coordinate(0, 55) == 0.2);
  CHECK(Grid({{-2, 2}}, {401}).coordinate(0, 220) == 0.2);
}

TEST_CASE("interpolation reproduces node values exactly") {
  const Grid g({{-0.4, 0.4}, {-0.75, 0.75}, {-0.75, 0.75}}, {7, 5, 6});
  std::vector<double> values(g.node_count());
  for (auto& v : values) v = uniform(-3, 3);
  const Interpolator interp(g, values);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    bool clamped = true;
    CHECK(interp(g.node_coordinate(i), &clamped) == values[i]);
    CHECK_FALSE(clamped);
  }
}

TEST_CASE("interpolation matches the tensor-product reference") {
  for (std::size_t d = 1; d <= 4; ++d) {
    std::vector<Interval> box;
    std::vector<std::size_t> dims;
    for (std::size_t a = 0; a < d; ++a) {
      const double lo = uniform(-5, 0);
      box.push_back({lo, lo + uniform(0.5, 5)});
      dims.push_back(3 + a * 2);
    }
    const Grid g(box, dims);
    std::vector<double> values(g.node_count());
    for (auto& v : values) v = uniform(-10, 10);
    const Interpolator interp(g, values);
    for (int i = 0; i < 100; ++i) {
      const auto s = uniform_state(box);
      CHECK(interp(s) == doctest::Approx(reference_multilinear(g, values, s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("interpolation is exact on affine functions") {
  const Grid g({{0, 1}, {-1, 1}}, {11, 21});
  std::vector<double> values(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto x = g.node_coordinate(i);
    values[i] = 2 * x[0] - 3 * x[1] + 0.5;
  }
  for (int i = 0; i < 200; ++i) {
    const auto s = uniform_state(g.bounds());
    CHECK(interpolate({g, values, Mode::minimize, 0.1, 1}, s) ==
          doctest::Approx(2 * s[0] - 3 * s[1] + 0.5).epsilon(1e-12));
  }
}

TEST_CASE("interpolant stays within the corner range") {
  const Grid g({{0, 1}, {0, 1}, {0, 1}}, {4, 4, 4});
  std::vector<double> values(g.node_count());
  for (auto& v : values) v = std::round(uniform(0, 3)) * 0.1;  // ties are common
  const Interpolator interp(g, values);
  for (int i = 0; i < 2000; ++i) {
    const auto s = uniform_state(g.bounds());
    std::size_t c[3];
    for (int a = 0; a < 3; ++a) c[a] = std::min<std::size_t>(2, std::size_t(s[a] * 3));
    double lo = 1e300, hi = -1e300;
    for (int m = 0; m < 8; ++m) {
      const std::size_t idx[3] = {c[0] + (m & 1), c[1] + ((m >> 1) & 1), c[2] + ((m >> 2) & 1)};
      const double v = values[g.flatten(idx)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double y = interp(s);
    CHECK(y >= lo);
    CHECK(y <= hi);
  }
}

TEST_CASE("out-of-domain queries are clamped") {
  const Grid g({{-1, 1}}, {3});
  const std::vector<double> values{5, 1, 7};
  const Interpolator interp(g, values);
  bool clamped = false;
  CHECK(interp(std::vector<double>{3.0}, &clamped) == 7);
  CHECK(clamped);
  CHECK(interp(std::vector<double>{-1.5}, &clamped) == 5);
  CHECK(clamped);
  CHECK(interp(std::vector<double>{0.5}, &clamped) == 4);
  CHECK_FALSE(clamped);
}

TEST_CASE("level masks") {
  const Grid g({{0, 1}}, {4});
  const ValueField f{g, {0.0, 0.1, 0.2, 0.3}, Mode::minimize, 0.1, 4};
  CHECK(level_mask(f, 0.2, Relation::less_equal) == NodeMask{1, 1, 1, 0});
  CHECK(level_mask(f, 0.2, Relation::greater_equal) == NodeMask{0, 0, 1, 1});
  CHECK(f.horizon() == doctest::Approx(0.4));
}

TEST_CASE("mode names") {
  CHECK(parse_mode(to_string(Mode::minimize)) == Mode::minimize);
  CHECK(parse_mode("maximize") == Mode::maximize);
  CHECK_THROWS_AS(parse_mode("median"), UsageError);
}

TEST_CASE("field file round-trip is bit-exact") {
  const Grid g({{-0.4, 0.4}, {-0.75, 0.75}}, {5, 4});
  ValueField f = ValueField::zeros(g, Mode::maximize, 0.01);
  f.k = 17;
  for (auto& v : f.values) v = uniform(0, 1) / 3.0;
  f.values[3] = -0.0;

  std::stringstream buf;
  write_field(buf, f, {{"kind", "viable"}, {"horizon", "0.15"}});
  std::map<std::string, std::string> meta;
  const auto back = read_field(buf, &meta);
  CHECK(back.grid == f.grid);
  CHECK(back.mode == f.mode);
  CHECK(back.dt == f.dt);
  CHECK(back.k == f.k);
  REQUIRE(back.values.size() == f.values.size());
  CHECK(std::memcmp(back.values.data(), f.values.data(), f.values.size() * sizeof(double)) == 0);
  CHECK(meta.at("kind") == "viable");
  CHECK(meta.at("horizon") == "0.15");

  {
    std::stringstream full;
    write_field(full, f);
    const std::string text = full.str();
    std::stringstream cut(text.substr(0, text.size() - 5));
    CHECK_THROWS_AS(read_field(cut), UsageError);
  }
  std::stringstream garbage("not a field\n");
  CHECK_THROWS_AS(read_field(garbage), UsageError);
}
