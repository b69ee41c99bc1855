#include "reachkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "reachkit/error.hpp"
#include "reachkit/format.hpp"

namespace reachkit {

Grid::Grid(std::vector<Interval> bounds, std::vector<std::size_t> dims)
    : bounds_(std::move(bounds)), dims_(std::move(dims)) {
  if (bounds_.empty()) throw UsageError("grid: no dimensions");
  if (bounds_.size() > kMaxDim)
    throw UsageError("grid: at most " + std::to_string(kMaxDim) + " dimensions supported");
  if (dims_.size() != bounds_.size())
    throw UsageError("grid: " + std::to_string(dims_.size()) + " node counts for " +
                     std::to_string(bounds_.size()) + " dimensions");
  spacing_.resize(dim());
  strides_.resize(dim());
  node_count_ = 1;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (dims_[a] < 2) throw UsageError("grid: axis " + std::to_string(a) + " needs >= 2 nodes");
    if (!(bounds_[a].lo < bounds_[a].hi))
      throw UsageError("grid: axis " + std::to_string(a) + " has empty bounds");
    spacing_[a] = (bounds_[a].hi - bounds_[a].lo) / static_cast<double>(dims_[a] - 1);
    node_count_ *= dims_[a];
  }
  std::size_t stride = 1;
  for (std::size_t a = dim(); a-- > 0;) {
    strides_[a] = stride;
    stride *= dims_[a];
  }
}

std::vector<double> Grid::node_coordinate(std::span<const std::size_t> idx) const {
  if (idx.size() != dim())
    throw UsageError("node index has " + std::to_string(idx.size()) + " components, grid has " +
                     std::to_string(dim()));
  std::vector<double> out(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    if (idx[a] >= dims_[a])
      throw UsageError("node index " + std::to_string(idx[a]) + " out of range on axis " +
                       std::to_string(a));
    out[a] = coordinate(a, idx[a]);
  }
  return out;
}

std::vector<double> Grid::node_coordinate(std::size_t flat) const {
  if (flat >= node_count_) throw UsageError("flat node index out of range");
  std::vector<double> out(dim());
  node_coordinate_into(flat, out);
  return out;
}

void Grid::node_coordinate_into(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = dim(); a-- > 0;) {
    out[a] = coordinate(a, flat % dims_[a]);
    flat /= dims_[a];
  }
}

std::size_t Grid::flatten(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim(); ++a) flat += idx[a] * strides_[a];
  return flat;
}

void Grid::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
  for (std::size_t a = dim(); a-- > 0;) {
    idx[a] = flat % dims_[a];
    flat /= dims_[a];
  }
}

bool Grid::in_domain(std::span<const double> s) const {
  for (std::size_t a = 0; a < dim(); ++a) {
    if (!bounds_[a].contains(s[a])) return false;
  }
  return true;
}

std::vector<double> Grid::clamp(std::span<const double> s) const {
  std::vector<double> out(s.begin(), s.end());
  for (std::size_t a = 0; a < dim(); ++a) out[a] = std::clamp(out[a], bounds_[a].lo, bounds_[a].hi);
  return out;
}

std::string to_string(Mode mode) { return mode == Mode::minimize ? "minimize" : "maximize"; }

Mode parse_mode(const std::string& text) {
  if (text == "minimize") return Mode::minimize;
  if (text == "maximize") return Mode::maximize;
  throw UsageError("mode must be 'minimize' or 'maximize', got '" + text + "'");
}

ValueField ValueField::zeros(Grid grid, Mode mode, double dt) {
  ValueField f;
  f.values.assign(grid.node_count(), 0.0);
  f.grid = std::move(grid);
  f.mode = mode;
  f.dt = dt;
  f.k = 0;
  return f;
}

// ---------------------------------------------------------------------------

Interpolator::Interpolator(const Grid& grid, std::span<const double> values)
    : grid_(&grid), values_(values) {
  if (values.size() != grid.node_count())
    throw UsageError("interpolator: value count does not match grid");
  const std::size_t d = grid.dim();
  // Corner bit (d-1-a) selects the upper node on axis a, so the last axis is
  // the least significant bit and pairs (2j, 2j+1) differ only on it.
  for (std::size_t c = 0; c < (std::size_t{1} << d); ++c) {
    std::size_t off = 0;
    for (std::size_t a = 0; a < d; ++a) {
      if (c & (std::size_t{1} << (d - 1 - a))) off += grid.strides()[a];
    }
    corner_offset_[c] = off;
  }
}

double Interpolator::operator()(std::span<const double> s, bool* clamped) const {
  const Grid& g = *grid_;
  const std::size_t d = g.dim();
  std::array<double, kMaxDim> t{};
  std::size_t base = 0;
  bool was_clamped = false;

  for (std::size_t a = 0; a < d; ++a) {
    const auto& b = g.bounds()[a];
    double x = s[a];
    if (x < b.lo) {
      x = b.lo;
      was_clamped = true;
    } else if (x > b.hi) {
      x = b.hi;
      was_clamped = true;
    } else if (std::isnan(x)) {
      throw ModelError("interpolation query is NaN");
    }
    const std::size_t top = g.dims()[a] - 2;
    const double h = g.spacing(a);
    double pos = std::floor((x - b.lo) / h);
    std::size_t c = pos <= 0 ? 0 : std::min(static_cast<std::size_t>(pos), top);
    // Pin the cell to the node coordinates as computed by the grid so that
    // queries exactly on a node reproduce the stored value.
    if (c > 0 && x < g.coordinate(a, c)) {
      --c;
    } else if (c < top && x >= g.coordinate(a, c + 1)) {
      ++c;
    }
    const double lo_node = g.coordinate(a, c);
    double w;
    if (x >= g.coordinate(a, c + 1)) {
      w = 1.0;
    } else {
      w = std::clamp((x - lo_node) / h, 0.0, 1.0);
    }
    t[a] = w;
    base += c * g.strides()[a];
  }
  if (clamped) *clamped = was_clamped;

  std::array<double, (1u << kMaxDim)> v;
  const std::size_t n = std::size_t{1} << d;
  for (std::size_t c = 0; c < n; ++c) v[c] = values_[base + corner_offset_[c]];

  // Collapse the last axis first. Each lerp is clamped to its endpoints so
  // the result never leaves the range of the corner values.
  std::size_t m = n;
  for (std::size_t a = d; a-- > 0;) {
    const double w = t[a];
    const double u = 1.0 - w;
    m >>= 1;
    for (std::size_t j = 0; j < m; ++j) {
      const double lo = v[2 * j], hi = v[2 * j + 1];
      const double r = u * lo + w * hi;
      v[j] = std::clamp(r, std::min(lo, hi), std::max(lo, hi));
    }
  }
  return v[0];
}

double interpolate(const ValueField& field, std::span<const double> s) {
  if (s.size() != field.grid.dim())
    throw UsageError("interpolate: state has " + std::to_string(s.size()) +
                     " components, field has " + std::to_string(field.grid.dim()));
  return Interpolator(field.grid, field.values)(s);
}

NodeMask level_mask(const ValueField& field, double threshold, Relation relation) {
  NodeMask mask(field.values.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double v = field.values[i];
    mask[i] = relation == Relation::less_equal ? (v <= threshold) : (v >= threshold);
  }
  return mask;
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kMagic = "reachkit-field 1";
constexpr const char* kOrder = "row_major_last_fastest";

void put_le(std::ostream& out, double x) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof x);
  std::memcpy(&bits, &x, sizeof bits);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace

void write_field(std::ostream& out, const ValueField& field,
                 const std::map<std::string, std::string>& meta) {
  if (field.values.size() != field.grid.node_count())
    throw UsageError("write_field: value count does not match grid");
  out << kMagic << '\n' << "order " << kOrder << '\n';
  for (const auto& [key, value] : meta) {
    if (key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos)
      throw UsageError("write_field: metadata key/value contains whitespace or newline");
    out << "meta " << key << ' ' << value << '\n';
  }
  out << "dims";
  for (auto n : field.grid.dims()) out << ' ' << n;
  out << "\nbounds";
  for (const auto& b : field.grid.bounds()) out << ' ' << format_double(b.lo) << ' ' << format_double(b.hi);
  out << "\nmode " << to_string(field.mode) << "\ndt " << format_double(field.dt) << "\nk "
      << field.k << '\n';
  for (double v : field.values) put_le(out, v);
  if (!out) throw UsageError("write_field: stream error");
}

ValueField read_field(std::istream& in, std::map<std::string, std::string>* meta) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw UsageError("not a value-field file (bad magic line)");
  std::vector<std::size_t> dims;
  std::vector<Interval> bounds;
  std::string mode_text;
  double dt = 0;
  bool have_dt = false, have_k = false;
  long long k = 0;

  while (!have_k) {
    if (!std::getline(in, line)) throw UsageError("value-field file: truncated header");
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "order") {
      std::string order;
      ls >> order;
      if (order != kOrder) throw UsageError("value-field file: unsupported order '" + order + "'");
    } else if (key == "meta") {
      std::string mkey, rest;
      ls >> mkey;
      std::getline(ls >> std::ws, rest);
      if (meta) (*meta)[mkey] = rest;
    } else if (key == "dims") {
      std::size_t n;
      while (ls >> n) dims.push_back(n);
    } else if (key == "bounds") {
      std::string lo, hi;
      while (ls >> lo >> hi) bounds.push_back({parse_double(lo), parse_double(hi)});
    } else if (key == "mode") {
      ls >> mode_text;
    } else if (key == "dt") {
      std::string text;
      ls >> text;
      dt = parse_double(text);
      have_dt = true;
    } else if (key == "k") {
      if (!(ls >> k) || k < 0) throw UsageError("value-field file: bad k line");
      have_k = true;
    } else {
      throw UsageError("value-field file: unknown header key '" + key + "'");
    }
  }
  if (dims.empty() || bounds.empty() || mode_text.empty() || !have_dt)
    throw UsageError("value-field file: incomplete header");

  ValueField f;
  f.grid = Grid(std::move(bounds), std::move(dims));
  f.mode = parse_mode(mode_text);
  f.dt = dt;
  f.k = static_cast<int>(k);
  const std::size_t n = f.grid.node_count();
  std::vector<unsigned char> raw(n * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw UsageError("value-field file: expected " + std::to_string(n) + " values");
  f.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.values[i] = get_le(raw.data() + 8 * i);
  return f;
}

void save_field(const std::string& path, const ValueField& field,
                const std::map<std::string, std::string>& meta) {
  // Write beside the target and rename so readers never see a partial file.
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp + "'");
    try {
      write_field(out, field, meta);
    } catch (...) {
      out.close();
      std::remove(tmp.c_str());
      throw;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw UsageError("cannot move field file into place at '" + path + "': " + ec.message());
  }
}

ValueField load_field(const std::string& path, std::map<std::string, std::string>* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open value-field file '" + path + "'");
  return read_field(in, meta);
}

}  // namespace reachkit
