#include "reachkit/targets.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <variant>

#include "reachkit/error.hpp"

namespace reachkit {

std::size_t VoxelMask::cell_count() const {
  std::size_t n = 1;
  for (auto c : cells) n *= c;
  return n;
}

void VoxelMask::validate() const {
  if (bounds.empty()) throw UsageError("voxel mask: no dimensions");
  if (cells.size() != bounds.size())
    throw UsageError("voxel mask: cells_per_dim and bounds differ in length");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (cells[i] == 0) throw UsageError("voxel mask: zero cells in dimension " + std::to_string(i));
    if (!(bounds[i].lo < bounds[i].hi))
      throw UsageError("voxel mask: empty bounds in dimension " + std::to_string(i));
  }
  if (bits.size() != cell_count())
    throw UsageError("voxel mask: bit count " + std::to_string(bits.size()) + " != " +
                     std::to_string(cell_count()));
}

std::ptrdiff_t VoxelMask::cell_of(std::span<const double> s) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const double x = s[i];
    const auto& b = bounds[i];
    if (!(b.lo <= x && x <= b.hi)) return -1;
    const double w = (b.hi - b.lo) / static_cast<double>(cells[i]);
    auto c = static_cast<std::size_t>(std::floor((x - b.lo) / w));
    if (c >= cells[i]) c = cells[i] - 1;
    // floor() can land one cell off when x sits next to a cell edge; edges
    // are lo + c*w as computed here.
    if (c > 0 && x < b.lo + static_cast<double>(c) * w) --c;
    else if (c + 1 < cells[i] && x >= b.lo + static_cast<double>(c + 1) * w) ++c;
    flat = flat * cells[i] + c;
  }
  return static_cast<std::ptrdiff_t>(flat);
}

bool VoxelMask::contains(std::span<const double> s) const {
  const auto c = cell_of(s);
  return c >= 0 && bits[static_cast<std::size_t>(c)] != 0;
}

VoxelMask read_voxel_mask(std::istream& in) {
  VoxelMask mask;
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw ConfigError(std::string("voxel mask: missing ") + what);
  };

  next_line("dims line");
  {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key != "dims") throw ConfigError("voxel mask: expected 'dims', got '" + key + "'");
    std::size_t n;
    while (ls >> n) mask.cells.push_back(n);
  }
  next_line("bounds line");
  {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key != "bounds") throw ConfigError("voxel mask: expected 'bounds', got '" + key + "'");
    Interval iv;
    while (ls >> iv.lo >> iv.hi) mask.bounds.push_back(iv);
  }
  if (mask.cells.empty() || mask.cells.size() != mask.bounds.size())
    throw ConfigError("voxel mask: dims and bounds disagree");

  const std::size_t row = mask.cells.back();
  const std::size_t rows = mask.cells.empty() ? 0 : mask.cell_count() / (row == 0 ? 1 : row);
  mask.bits.reserve(mask.cell_count());
  for (std::size_t r = 0; r < rows; ++r) {
    next_line("bit row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != row)
      throw ConfigError("voxel mask: row " + std::to_string(r) + " has " +
                        std::to_string(line.size()) + " bits, expected " + std::to_string(row));
    for (char ch : line) {
      if (ch != '0' && ch != '1')
        throw ConfigError("voxel mask: row " + std::to_string(r) + " contains '" +
                          std::string(1, ch) + "'");
      mask.bits.push_back(ch == '1' ? 1 : 0);
    }
  }
  try {
    mask.validate();
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
  return mask;
}

void write_voxel_mask(std::ostream& out, const VoxelMask& mask) {
  mask.validate();
  out << "dims";
  for (auto c : mask.cells) out << ' ' << c;
  out << "\nbounds";
  std::ostringstream bs;
  bs.precision(17);
  for (const auto& b : mask.bounds) bs << ' ' << b.lo << ' ' << b.hi;
  out << bs.str() << '\n';
  const std::size_t row = mask.cells.back();
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    out << (mask.bits[i] ? '1' : '0');
    if ((i + 1) % row == 0) out << '\n';
  }
}

VoxelMask load_voxel_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open voxel mask file '" + path + "'");
  return read_voxel_mask(in);
}

void save_voxel_mask(const std::string& path, const VoxelMask& mask) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write voxel mask file '" + path + "'");
  write_voxel_mask(out, mask);
}

// ---------------------------------------------------------------------------

struct TargetSet::Node {
  std::size_t dim = 0;
  std::variant<std::vector<Interval>, std::vector<TargetSet>, VoxelMask, TargetSet> data;
};

TargetSet::TargetSet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

TargetSet TargetSet::box(std::vector<Interval> bounds) {
  if (bounds.empty()) throw UsageError("box target needs at least one dimension");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(bounds[i].lo <= bounds[i].hi))
      throw UsageError("box target: lo > hi in dimension " + std::to_string(i));
  }
  auto node = std::make_shared<Node>();
  node->dim = bounds.size();
  node->data = std::move(bounds);
  return TargetSet(std::move(node));
}

TargetSet TargetSet::union_of(std::vector<TargetSet> members) {
  if (members.empty()) throw UsageError("union target needs at least one member");
  const auto d = members.front().dim();
  for (const auto& m : members) {
    if (m.dim() != d) throw UsageError("union target: members differ in dimension");
  }
  auto node = std::make_shared<Node>();
  node->dim = d;
  node->data = std::move(members);
  return TargetSet(std::move(node));
}

TargetSet TargetSet::voxel(VoxelMask mask) {
  mask.validate();
  auto node = std::make_shared<Node>();
  node->dim = mask.dim();
  node->data = std::move(mask);
  return TargetSet(std::move(node));
}

TargetSet TargetSet::complement(TargetSet inner) {
  auto node = std::make_shared<Node>();
  node->dim = inner.dim();
  node->data = std::move(inner);
  return TargetSet(std::move(node));
}

TargetSet::Kind TargetSet::kind() const { return static_cast<Kind>(node_->data.index()); }

std::size_t TargetSet::dim() const { return node_->dim; }

bool TargetSet::contains(std::span<const double> s) const {
  if (s.size() != dim())
    throw UsageError("target membership: state has " + std::to_string(s.size()) +
                     " components, target has " + std::to_string(dim()));
  return contains_unchecked(s);
}

bool TargetSet::contains_unchecked(std::span<const double> s) const {
  const auto& data = node_->data;
  switch (kind()) {
    case Kind::box: {
      const auto& b = std::get<0>(data);
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(b[i].lo <= s[i] && s[i] <= b[i].hi)) return false;
      }
      return true;
    }
    case Kind::union_of:
      for (const auto& m : std::get<1>(data)) {
        if (m.contains_unchecked(s)) return true;
      }
      return false;
    case Kind::voxel_mask:
      return std::get<2>(data).contains(s);
    case Kind::complement:
      return !std::get<3>(data).contains_unchecked(s);
  }
  return false;
}

const std::vector<Interval>& TargetSet::box_bounds() const {
  if (kind() != Kind::box) throw UsageError("target is not a box");
  return std::get<0>(node_->data);
}

const std::vector<TargetSet>& TargetSet::members() const {
  if (kind() != Kind::union_of) throw UsageError("target is not a union");
  return std::get<1>(node_->data);
}

const VoxelMask& TargetSet::mask() const {
  if (kind() != Kind::voxel_mask) throw UsageError("target is not a voxel mask");
  return std::get<2>(node_->data);
}

const TargetSet& TargetSet::inner() const {
  if (kind() != Kind::complement) throw UsageError("target is not a complement");
  return std::get<3>(node_->data);
}

TargetSet complement_within(const TargetSet& target) { return TargetSet::complement(target); }

TargetSet voxel_from_cells(std::vector<Interval> bounds, std::vector<std::size_t> cells_per_dim,
                           std::span<const std::vector<std::size_t>> marked_cells) {
  VoxelMask mask;
  mask.bounds = std::move(bounds);
  mask.cells = std::move(cells_per_dim);
  mask.bits.assign(mask.cell_count(), 0);
  mask.validate();
  for (const auto& idx : marked_cells) {
    if (idx.size() != mask.dim())
      throw UsageError("voxel cell index has " + std::to_string(idx.size()) +
                       " components, mask has " + std::to_string(mask.dim()));
    std::size_t flat = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= mask.cells[i])
        throw UsageError("voxel cell index " + std::to_string(idx[i]) + " out of range in dimension " +
                         std::to_string(i));
      flat = flat * mask.cells[i] + idx[i];
    }
    mask.bits[flat] = 1;
  }
  return TargetSet::voxel(std::move(mask));
}

}  // namespace reachkit
