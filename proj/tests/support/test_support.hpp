#pragma once

// Test-only helpers. Nothing here calls into the library's interpolation or
// recursion, so they can serve as independent references.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "reachkit/grid.hpp"

namespace reachkit::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(0x5eed5eedULL);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline std::vector<double> uniform_state(const std::vector<Interval>& box) {
  std::vector<double> s;
  for (const auto& b : box) s.push_back(uniform(b.lo, b.hi));
  return s;
}

/// Tensor-product weighted sum over the 2^d corners of the cell holding s:
/// sum_c value(c) * prod_a (bit ? t_a : 1 - t_a). Cell location uses the
/// textbook floor((s - lo) / h); s must be strictly inside the domain.
inline double reference_multilinear(const Grid& grid, const std::vector<double>& values,
                                    const std::vector<double>& s) {
  const std::size_t d = grid.dim();
  std::vector<std::size_t> cell(d);
  std::vector<double> t(d);
  for (std::size_t a = 0; a < d; ++a) {
    const double lo = grid.bounds()[a].lo;
    const double h = (grid.bounds()[a].hi - lo) / static_cast<double>(grid.dims()[a] - 1);
    double pos = (s[a] - lo) / h;
    auto c = static_cast<std::size_t>(std::floor(pos));
    if (c >= grid.dims()[a] - 1) c = grid.dims()[a] - 2;
    cell[a] = c;
    t[a] = pos - static_cast<double>(c);
  }
  double sum = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const bool up = (corner >> a) & 1u;
      w *= up ? t[a] : 1.0 - t[a];
      std::size_t stride = 1;
      for (std::size_t b = a + 1; b < d; ++b) stride *= grid.dims()[b];
      flat += (cell[a] + (up ? 1 : 0)) * stride;
    }
    sum += w * values[flat];
  }
  return sum;
}

/// Minimum time for s' = u, |u| <= 1, to reach [-a, a].
inline double single_integrator_time(double s, double a) { return std::max(0.0, std::abs(s) - a); }

}  // namespace reachkit::testing
