#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace reachkit {

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Irregular set made of marked axis-aligned cells over a rectangular region.
///
/// Cells are half-open [lo + i*w, lo + (i+1)*w), the last cell in each
/// dimension also closed above. Points outside `bounds` are never members.
/// Bits are row-major with the last dimension fastest.
struct VoxelMask {
  std::vector<Interval> bounds;
  std::vector<std::size_t> cells;
  std::vector<std::uint8_t> bits;

  std::size_t dim() const { return bounds.size(); }
  std::size_t cell_count() const;
  /// Flat index of the cell holding `s`, or -1 when outside bounds.
  std::ptrdiff_t cell_of(std::span<const double> s) const;
  bool contains(std::span<const double> s) const;
  void validate() const;

  friend bool operator==(const VoxelMask&, const VoxelMask&) = default;
};

/// Text format:
///   dims n1 ... nd
///   bounds lo1 hi1 ... lod hid
///   then prod(n1..n_{d-1}) lines of n_d '0'/'1' characters.
VoxelMask read_voxel_mask(std::istream& in);
void write_voxel_mask(std::ostream& out, const VoxelMask& mask);
VoxelMask load_voxel_mask(const std::string& path);
void save_voxel_mask(const std::string& path, const VoxelMask& mask);

/// Membership oracle for a target set K. Cheap to copy (shared immutable tree).
class TargetSet {
 public:
  enum class Kind { box, union_of, voxel_mask, complement };

  static TargetSet box(std::vector<Interval> bounds);
  static TargetSet union_of(std::vector<TargetSet> members);
  static TargetSet voxel(VoxelMask mask);
  /// Logical negation over all of R^d.
  static TargetSet complement(TargetSet inner);

  Kind kind() const;
  std::size_t dim() const;

  /// Throws UsageError when s has the wrong length.
  bool contains(std::span<const double> s) const;
  /// Same without the length check.
  bool contains_unchecked(std::span<const double> s) const;

  // Variant accessors; each throws UsageError on the wrong kind.
  const std::vector<Interval>& box_bounds() const;
  const std::vector<TargetSet>& members() const;
  const VoxelMask& mask() const;
  const TargetSet& inner() const;

 private:
  struct Node;
  explicit TargetSet(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

TargetSet complement_within(const TargetSet& target);

/// Voxel target with exactly `marked_cells` set.
TargetSet voxel_from_cells(std::vector<Interval> bounds, std::vector<std::size_t> cells_per_dim,
                           std::span<const std::vector<std::size_t>> marked_cells);

}  // namespace reachkit
