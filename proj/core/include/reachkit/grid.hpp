#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reachkit/targets.hpp"

namespace reachkit {

/// Largest state dimension the grid and interpolation support.
inline constexpr std::size_t kMaxDim = 8;

/// Rectangular lattice over the computational domain. Node i on axis a sits at
/// lo_a + i * spacing_a, spacing_a = (hi_a - lo_a) / (N_a - 1). Flattening is
/// row-major with the last axis fastest.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<Interval> bounds, std::vector<std::size_t> dims);

  std::size_t dim() const { return bounds_.size(); }
  const std::vector<Interval>& bounds() const { return bounds_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<std::size_t>& strides() const { return strides_; }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  std::size_t node_count() const { return node_count_; }

  /// lo + i * spacing, evaluated as a weighted mean of the bounds so that the
  /// end nodes are exact and symmetric domains place nodes symmetrically.
  double coordinate(std::size_t axis, std::size_t i) const {
    const std::size_t last = dims_[axis] - 1;
    const Interval& b = bounds_[axis];
    if (i == 0) return b.lo;
    if (i == last) return b.hi;
    return (static_cast<double>(last - i) * b.lo + static_cast<double>(i) * b.hi) /
           static_cast<double>(last);
  }

  /// Checked: throws UsageError for a wrong-length or out-of-range index.
  std::vector<double> node_coordinate(std::span<const std::size_t> idx) const;
  std::vector<double> node_coordinate(std::size_t flat) const;
  void node_coordinate_into(std::size_t flat, std::span<double> out) const;

  std::size_t flatten(std::span<const std::size_t> idx) const;
  void unflatten(std::size_t flat, std::span<std::size_t> idx) const;

  bool in_domain(std::span<const double> s) const;
  std::vector<double> clamp(std::span<const double> s) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.bounds_ == b.bounds_ && a.dims_ == b.dims_;
  }

 private:
  std::vector<Interval> bounds_;
  std::vector<std::size_t> dims_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t node_count_ = 0;
};

enum class Mode { minimize, maximize };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// One scalar per grid node after k recursions of step dt.
struct ValueField {
  Grid grid;
  std::vector<double> values;
  Mode mode = Mode::minimize;
  double dt = 0.0;
  int k = 0;

  static ValueField zeros(Grid grid, Mode mode, double dt);
  double horizon() const { return static_cast<double>(k) * dt; }
};

/// Multilinear interpolation over a value array on `grid`. Holds references;
/// the grid and values must outlive it. Queries outside the domain are clamped
/// componentwise first.
class Interpolator {
 public:
  Interpolator(const Grid& grid, std::span<const double> values);

  /// Sets *clamped (if given) when s was outside the domain.
  double operator()(std::span<const double> s, bool* clamped = nullptr) const;

 private:
  const Grid* grid_;
  std::span<const double> values_;
  std::array<std::size_t, (1u << kMaxDim)> corner_offset_{};
};

double interpolate(const ValueField& field, std::span<const double> s);

/// Per-node boolean array, same flattening as the grid.
using NodeMask = std::vector<std::uint8_t>;

enum class Relation { less_equal, greater_equal };

NodeMask level_mask(const ValueField& field, double threshold, Relation relation);

/// Binary value-field file. Text header lines, the last one `k <n>`, followed
/// immediately by the node values as little-endian IEEE-754 doubles in storage
/// order. Extra metadata is carried as `meta <key> <value>` lines.
void write_field(std::ostream& out, const ValueField& field,
                 const std::map<std::string, std::string>& meta = {});
ValueField read_field(std::istream& in, std::map<std::string, std::string>* meta = nullptr);

void save_field(const std::string& path, const ValueField& field,
                const std::map<std::string, std::string>& meta = {});
ValueField load_field(const std::string& path,
                      std::map<std::string, std::string>* meta = nullptr);

}  // namespace reachkit
