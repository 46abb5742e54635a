#include "topomap/cloud_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "topomap/disjoint_set.hpp"
#include "topomap/error.hpp"

namespace topomap {

PointCloud::PointCloud(std::vector<Vec3> points) {
  points_.reserve(points.size());
  for (const Vec3& p : points) add(p);
}

void PointCloud::add(Vec3 p) {
  if (points_.empty()) {
    bounds_ = {p, p};
  } else {
    bounds_.min = {std::min(bounds_.min.x, p.x), std::min(bounds_.min.y, p.y), std::min(bounds_.min.z, p.z)};
    bounds_.max = {std::max(bounds_.max.x, p.x), std::max(bounds_.max.y, p.y), std::max(bounds_.max.z, p.z)};
  }
  points_.push_back(p);
}

std::optional<CloudFormat> parse_cloud_format(const std::string& name) {
  if (name == "ply_ascii") return CloudFormat::ply_ascii;
  if (name == "ply_binary_le") return CloudFormat::ply_binary_le;
  if (name == "pcd_ascii") return CloudFormat::pcd_ascii;
  if (name == "xyz_text" || name == "xyz") return CloudFormat::xyz_text;
  return std::nullopt;
}

const char* to_string(CloudFormat format) {
  switch (format) {
    case CloudFormat::ply_ascii: return "ply_ascii";
    case CloudFormat::ply_binary_le: return "ply_binary_le";
    case CloudFormat::pcd_ascii: return "pcd_ascii";
    case CloudFormat::xyz_text: return "xyz_text";
  }
  return "unknown";
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

bool finite(const Vec3& p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); }

// Line cursor over a text buffer that tracks byte offsets for error reporting.
class LineReader {
public:
  explicit LineReader(const std::string& text, std::size_t start = 0) : text_(text), pos_(start) {}

  bool next(std::string_view& line, std::size_t& offset) {
    if (pos_ >= text_.size()) return false;
    offset = pos_;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string::npos) end = text_.size();
    line = std::string_view(text_).substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    return true;
  }

  std::size_t position() const { return pos_; }

private:
  const std::string& text_;
  std::size_t pos_;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  std::string s(tok);
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

bool parse_size(std::string_view tok, std::size_t& out) {
  std::string s(tok);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') return false;
  out = static_cast<std::size_t>(v);
  return true;
}

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

LoadResult finish(LoadResult r, const std::filesystem::path& path) {
  if (r.cloud.empty())
    throw Error(ErrorCode::EmptyCloud, "no valid points in " + path.string() + " (" +
                                           std::to_string(r.rejected) + " rejected)");
  return r;
}

LoadResult load_xyz(const std::string& text, const std::filesystem::path& path) {
  LoadResult r;
  LineReader reader(text);
  std::string_view line;
  std::size_t offset = 0;
  while (reader.next(line, offset)) {
    if (is_blank_or_comment(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() < 3) throw ParseError("expected at least 3 values per line", offset);
    Vec3 p;
    if (!parse_double(tok[0], p.x) || !parse_double(tok[1], p.y) || !parse_double(tok[2], p.z))
      throw ParseError("malformed coordinate", offset);
    if (finite(p)) r.cloud.add(p); else ++r.rejected;
  }
  return finish(std::move(r), path);
}

// ---- PLY ------------------------------------------------------------------

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<PlyType> ply_type(std::string_view name) {
  static const std::array<std::pair<std::string_view, PlyType>, 16> table{{
      {"char", PlyType::i8},    {"int8", PlyType::i8},      {"uchar", PlyType::u8},
      {"uint8", PlyType::u8},   {"short", PlyType::i16},    {"int16", PlyType::i16},
      {"ushort", PlyType::u16}, {"uint16", PlyType::u16},   {"int", PlyType::i32},
      {"int32", PlyType::i32},  {"uint", PlyType::u32},     {"uint32", PlyType::u32},
      {"float", PlyType::f32},  {"float32", PlyType::f32},  {"double", PlyType::f64},
      {"float64", PlyType::f64},
  }};
  for (const auto& [n, t] : table)
    if (n == name) return t;
  return std::nullopt;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8: case PlyType::u8: return 1;
    case PlyType::i16: case PlyType::u16: return 2;
    case PlyType::i32: case PlyType::u32: case PlyType::f32: return 4;
    case PlyType::f64: return 8;
  }
  return 0;
}

double ply_read(const char* p, PlyType t) {
  switch (t) {
    case PlyType::i8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
    case PlyType::u8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
    case PlyType::i16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::u16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
    case PlyType::i32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::u32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
    case PlyType::f32: { float v; std::memcpy(&v, p, 4); return v; }
    case PlyType::f64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

struct PlyHeader {
  bool binary = false;
  std::vector<PlyElement> elements;
  std::size_t data_start = 0;
};

PlyHeader parse_ply_header(const std::string& text) {
  PlyHeader h;
  LineReader reader(text);
  std::string_view line;
  std::size_t offset = 0;
  if (!reader.next(line, offset) || line != "ply") throw ParseError("missing 'ply' magic", 0);
  bool have_format = false;
  while (true) {
    if (!reader.next(line, offset)) throw ParseError("unterminated PLY header", text.size());
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError("malformed format line", offset);
      if (tok[1] == "ascii") h.binary = false;
      else if (tok[1] == "binary_little_endian") h.binary = true;
      else throw ParseError("unsupported PLY format '" + std::string(tok[1]) + "'", offset);
      have_format = true;
    } else if (tok[0] == "element") {
      PlyElement e;
      if (tok.size() != 3 || !parse_size(tok[2], e.count)) throw ParseError("malformed element line", offset);
      e.name = tok[1];
      h.elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (h.elements.empty()) throw ParseError("property before element", offset);
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        prop.is_list = true;
        prop.name = tok[4];
      } else if (tok.size() == 3) {
        const auto t = ply_type(tok[1]);
        if (!t) throw ParseError("unknown property type '" + std::string(tok[1]) + "'", offset);
        prop.type = *t;
        prop.name = tok[2];
      } else {
        throw ParseError("malformed property line", offset);
      }
      h.elements.back().props.push_back(std::move(prop));
    } else {
      throw ParseError("unexpected header keyword '" + std::string(tok[0]) + "'", offset);
    }
  }
  if (!have_format) throw ParseError("missing format line", 0);
  h.data_start = reader.position();
  return h;
}

LoadResult load_ply(const std::string& text, const std::filesystem::path& path, bool expect_binary) {
  const PlyHeader h = parse_ply_header(text);
  if (h.binary != expect_binary)
    throw ParseError(std::string("PLY body is ") + (h.binary ? "binary" : "ascii") +
                         " but a different format was declared",
                     0);
  std::size_t vertex_elem = h.elements.size();
  for (std::size_t i = 0; i < h.elements.size(); ++i)
    if (h.elements[i].name == "vertex") { vertex_elem = i; break; }
  if (vertex_elem == h.elements.size()) throw ParseError("no vertex element", 0);
  const PlyElement& ve = h.elements[vertex_elem];
  std::array<int, 3> axis{-1, -1, -1};
  for (std::size_t p = 0; p < ve.props.size(); ++p) {
    if (ve.props[p].is_list) continue;
    if (ve.props[p].name == "x") axis[0] = static_cast<int>(p);
    if (ve.props[p].name == "y") axis[1] = static_cast<int>(p);
    if (ve.props[p].name == "z") axis[2] = static_cast<int>(p);
  }
  if (axis[0] < 0 || axis[1] < 0 || axis[2] < 0) throw ParseError("vertex element lacks x/y/z", 0);

  LoadResult r;
  r.cloud.reserve(ve.count);
  if (!h.binary) {
    LineReader reader(text, h.data_start);
    std::string_view line;
    std::size_t offset = h.data_start;
    for (std::size_t e = 0; e < vertex_elem; ++e)
      for (std::size_t k = 0; k < h.elements[e].count; ++k)
        if (!reader.next(line, offset)) throw ParseError("truncated PLY body", text.size());
    for (std::size_t k = 0; k < ve.count; ++k) {
      if (!reader.next(line, offset)) throw ParseError("truncated vertex list", text.size());
      const auto tok = split_ws(line);
      if (tok.size() < ve.props.size()) throw ParseError("short vertex line", offset);
      std::array<double, 3> v{};
      for (int a = 0; a < 3; ++a)
        if (!parse_double(tok[static_cast<std::size_t>(axis[a])], v[a]))
          throw ParseError("malformed vertex value", offset);
      const Vec3 p{v[0], v[1], v[2]};
      if (finite(p)) r.cloud.add(p); else ++r.rejected;
    }
  } else {
    std::size_t pos = h.data_start;
    for (std::size_t e = 0; e < vertex_elem; ++e) {
      std::size_t stride = 0;
      for (const auto& prop : h.elements[e].props) {
        if (prop.is_list) throw ParseError("list property before vertex element is unsupported", pos);
        stride += ply_size(prop.type);
      }
      pos += stride * h.elements[e].count;
    }
    std::vector<std::size_t> prop_offset;
    std::size_t stride = 0;
    for (const auto& prop : ve.props) {
      if (prop.is_list) throw ParseError("list property in vertex element is unsupported", pos);
      prop_offset.push_back(stride);
      stride += ply_size(prop.type);
    }
    if (pos + stride * ve.count > text.size()) throw ParseError("truncated binary vertex data", text.size());
    for (std::size_t k = 0; k < ve.count; ++k) {
      const char* rec = text.data() + pos + k * stride;
      std::array<double, 3> v{};
      for (int a = 0; a < 3; ++a) {
        const auto idx = static_cast<std::size_t>(axis[a]);
        v[a] = ply_read(rec + prop_offset[idx], ve.props[idx].type);
      }
      const Vec3 p{v[0], v[1], v[2]};
      if (finite(p)) r.cloud.add(p); else ++r.rejected;
    }
  }
  return finish(std::move(r), path);
}

// ---- PCD ------------------------------------------------------------------

LoadResult load_pcd(const std::string& text, const std::filesystem::path& path) {
  LineReader reader(text);
  std::string_view line;
  std::size_t offset = 0;
  std::vector<std::string> fields;
  std::vector<std::size_t> counts;
  std::size_t points = 0;
  bool have_points = false;
  while (true) {
    if (!reader.next(line, offset)) throw ParseError("PCD header without DATA line", text.size());
    if (is_blank_or_comment(line)) continue;
    const auto tok = split_ws(line);
    if (tok[0] == "FIELDS") {
      for (std::size_t i = 1; i < tok.size(); ++i) fields.emplace_back(tok[i]);
    } else if (tok[0] == "COUNT") {
      for (std::size_t i = 1; i < tok.size(); ++i) {
        std::size_t c = 0;
        if (!parse_size(tok[i], c)) throw ParseError("malformed COUNT", offset);
        counts.push_back(c);
      }
    } else if (tok[0] == "POINTS") {
      if (tok.size() != 2 || !parse_size(tok[1], points)) throw ParseError("malformed POINTS", offset);
      have_points = true;
    } else if (tok[0] == "DATA") {
      if (tok.size() != 2 || tok[1] != "ascii")
        throw ParseError("only 'DATA ascii' PCD bodies are supported", offset);
      break;
    } else if (tok[0] == "VERSION" || tok[0] == "SIZE" || tok[0] == "TYPE" || tok[0] == "WIDTH" ||
               tok[0] == "HEIGHT" || tok[0] == "VIEWPOINT") {
      continue;
    } else {
      throw ParseError("unexpected PCD header line", offset);
    }
  }
  if (counts.empty()) counts.assign(fields.size(), 1);
  if (counts.size() != fields.size()) throw ParseError("FIELDS/COUNT mismatch", 0);
  std::array<std::size_t, 3> col{SIZE_MAX, SIZE_MAX, SIZE_MAX};
  std::size_t columns = 0;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (fields[f] == "x") col[0] = columns;
    if (fields[f] == "y") col[1] = columns;
    if (fields[f] == "z") col[2] = columns;
    columns += counts[f];
  }
  if (col[0] == SIZE_MAX || col[1] == SIZE_MAX || col[2] == SIZE_MAX)
    throw ParseError("PCD lacks x/y/z fields", 0);

  LoadResult r;
  std::size_t seen = 0;
  while (reader.next(line, offset)) {
    if (is_blank_or_comment(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() < columns) throw ParseError("short PCD data line", offset);
    std::array<double, 3> v{};
    for (int a = 0; a < 3; ++a)
      if (!parse_double(tok[col[a]], v[a])) throw ParseError("malformed PCD value", offset);
    const Vec3 p{v[0], v[1], v[2]};
    if (finite(p)) r.cloud.add(p); else ++r.rejected;
    ++seen;
  }
  if (have_points && seen != points)
    throw ParseError("POINTS declares " + std::to_string(points) + " but body has " + std::to_string(seen),
                     text.size());
  return finish(std::move(r), path);
}

}  // namespace

CloudFormat detect_cloud_format(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".pcd") return CloudFormat::pcd_ascii;
  if (ext == ".ply") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::string line;
    for (int i = 0; i < 64 && std::getline(in, line); ++i) {
      if (line.rfind("format", 0) == 0)
        return line.find("binary_little_endian") != std::string::npos ? CloudFormat::ply_binary_le
                                                                       : CloudFormat::ply_ascii;
    }
    throw ParseError("PLY header has no format line", 0);
  }
  return CloudFormat::xyz_text;
}

LoadResult load_cloud(const std::filesystem::path& path, CloudFormat format) {
  const std::string text = read_file(path);
  switch (format) {
    case CloudFormat::xyz_text: return load_xyz(text, path);
    case CloudFormat::ply_ascii: return load_ply(text, path, false);
    case CloudFormat::ply_binary_le: return load_ply(text, path, true);
    case CloudFormat::pcd_ascii: return load_pcd(text, path);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown cloud format");
}

LoadResult load_cloud(const std::filesystem::path& path) { return load_cloud(path, detect_cloud_format(path)); }

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format, int precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  char buf[128];
  auto ascii_points = [&] {
    for (const Vec3& p : cloud.points()) {
      const int n = std::snprintf(buf, sizeof buf, "%.*f %.*f %.*f\n", precision, p.x, precision, p.y, precision, p.z);
      out.write(buf, n);
    }
  };
  switch (format) {
    case CloudFormat::xyz_text:
      ascii_points();
      break;
    case CloudFormat::ply_ascii:
    case CloudFormat::ply_binary_le:
      out << "ply\nformat " << (format == CloudFormat::ply_ascii ? "ascii" : "binary_little_endian")
          << " 1.0\nelement vertex " << cloud.size()
          << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
      if (format == CloudFormat::ply_ascii) {
        ascii_points();
      } else {
        static_assert(std::endian::native == std::endian::little, "binary PLY writer assumes little-endian host");
        for (const Vec3& p : cloud.points()) {
          const double v[3] = {p.x, p.y, p.z};
          out.write(reinterpret_cast<const char*>(v), sizeof v);
        }
      }
      break;
    case CloudFormat::pcd_ascii:
      out << "# .PCD v0.7 - Point Cloud Data file format\nVERSION 0.7\nFIELDS x y z\nSIZE 8 8 8\nTYPE F F F\n"
             "COUNT 1 1 1\nWIDTH "
          << cloud.size() << "\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS " << cloud.size() << "\nDATA ascii\n";
      ascii_points();
      break;
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

namespace {

constexpr int kKeyBits = 21;
constexpr std::int64_t kKeyMask = (std::int64_t{1} << kKeyBits) - 1;

std::uint64_t pack_cell(std::int64_t x, std::int64_t y, std::int64_t z) {
  if (x < 0 || y < 0 || z < 0 || x > kKeyMask || y > kKeyMask || z > kKeyMask)
    throw Error(ErrorCode::Capacity, "cloud extent exceeds the spatial hash range for the requested cell size");
  return (static_cast<std::uint64_t>(x) << (2 * kKeyBits)) | (static_cast<std::uint64_t>(y) << kKeyBits) |
         static_cast<std::uint64_t>(z);
}

std::array<std::int64_t, 3> cell_of(Vec3 p, Vec3 anchor, double cell) {
  return {static_cast<std::int64_t>(std::floor((p.x - anchor.x) / cell)),
          static_cast<std::int64_t>(std::floor((p.y - anchor.y) / cell)),
          static_cast<std::int64_t>(std::floor((p.z - anchor.z) / cell))};
}

}  // namespace

PointCloud voxel_downsample(const PointCloud& cloud, double cell) {
  if (cloud.empty()) return {};
  return voxel_downsample(cloud, cell, cloud.bounds().min);
}

PointCloud voxel_downsample(const PointCloud& cloud, double cell, Vec3 anchor) {
  if (!(cell > 0.0)) throw Error(ErrorCode::InvalidArgument, "voxel_downsample: cell must be > 0");
  const auto pts = cloud.points();
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = cell_of(pts[i], anchor, cell);
    keyed[i] = {pack_cell(c[0], c[1], c[2]), static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  PointCloud out;
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i;
    Vec3 sum{};
    while (j < keyed.size() && keyed[j].first == keyed[i].first) {
      sum = sum + pts[keyed[j].second];
      ++j;
    }
    out.add(sum * (1.0 / static_cast<double>(j - i)));
    i = j;
  }
  return out;
}

std::vector<std::size_t> euclidean_cluster_labels(std::span<const Vec3> points, double link_dist) {
  if (!(link_dist > 0.0)) throw Error(ErrorCode::InvalidArgument, "link distance must be > 0");
  const std::size_t n = points.size();
  std::vector<std::size_t> labels(n, 0);
  if (n == 0) return labels;

  // Cells of edge link/sqrt(3): any two points sharing a cell are linked.
  const double cell = link_dist / std::sqrt(3.0);
  Vec3 anchor = points[0];
  for (const Vec3& p : points)
    anchor = {std::min(anchor.x, p.x), std::min(anchor.y, p.y), std::min(anchor.z, p.z)};

  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = cell_of(points[i], anchor, cell);
    keyed[i] = {pack_cell(c[0], c[1], c[2]), static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());

  struct CellRange {
    std::uint64_t key;
    std::size_t begin, end;
  };
  std::vector<CellRange> cells;
  std::unordered_map<std::uint64_t, std::size_t> cell_index;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && keyed[j].first == keyed[i].first) ++j;
    cell_index.emplace(keyed[i].first, cells.size());
    cells.push_back({keyed[i].first, i, j});
    i = j;
  }

  DisjointSet ds(n);
  for (const CellRange& c : cells)
    for (std::size_t k = c.begin + 1; k < c.end; ++k) ds.unite(keyed[c.begin].second, keyed[k].second);

  // Half of the neighbour offsets whose cell boxes can hold a linked pair.
  const int reach = static_cast<int>(std::ceil(link_dist / cell));
  const double link2 = link_dist * link_dist;
  std::vector<std::array<int, 3>> offsets;
  for (int dx = -reach; dx <= reach; ++dx)
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dz = -reach; dz <= reach; ++dz) {
        const std::array<int, 3> d{dx, dy, dz};
        if (d <= std::array<int, 3>{0, 0, 0}) continue;
        double gap2 = 0.0;
        for (int a : d) {
          const double g = std::max(0, std::abs(a) - 1) * cell;
          gap2 += g * g;
        }
        if (gap2 <= link2) offsets.push_back(d);
      }

  for (const CellRange& c : cells) {
    const auto cx = static_cast<std::int64_t>(c.key >> (2 * kKeyBits));
    const auto cy = static_cast<std::int64_t>((c.key >> kKeyBits) & static_cast<std::uint64_t>(kKeyMask));
    const auto cz = static_cast<std::int64_t>(c.key & static_cast<std::uint64_t>(kKeyMask));
    for (const auto& d : offsets) {
      const std::int64_t nx = cx + d[0], ny = cy + d[1], nz = cz + d[2];
      if (nx < 0 || ny < 0 || nz < 0 || nx > kKeyMask || ny > kKeyMask || nz > kKeyMask) continue;
      const auto it = cell_index.find(pack_cell(nx, ny, nz));
      if (it == cell_index.end()) continue;
      const CellRange& o = cells[it->second];
      if (ds.find(keyed[c.begin].second) == ds.find(keyed[o.begin].second)) continue;
      bool linked = false;
      for (std::size_t a = c.begin; a < c.end && !linked; ++a)
        for (std::size_t b = o.begin; b < o.end; ++b)
          if (squared_distance(points[keyed[a].second], points[keyed[b].second]) <= link2) {
            ds.unite(keyed[a].second, keyed[b].second);
            linked = true;
            break;
          }
    }
  }

  std::vector<std::size_t> slot(n, SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = ds.find(i);
    if (slot[r] == SIZE_MAX) slot[r] = next++;
    labels[i] = slot[r];
  }
  return labels;
}

DenoiseResult denoise_clusters(const PointCloud& cloud, double link_dist, std::size_t min_points) {
  if (min_points < 1) throw Error(ErrorCode::InvalidArgument, "min_points must be >= 1");
  const auto labels = euclidean_cluster_labels(cloud.points(), link_dist);
  const std::size_t clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> sizes(clusters, 0);
  for (std::size_t l : labels) ++sizes[l];
  DenoiseResult r;
  for (std::size_t s : sizes) (s >= min_points ? r.kept_clusters : r.removed_clusters)++;
  r.cloud.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (sizes[labels[i]] >= min_points) r.cloud.add(cloud[i]);
    else ++r.removed_points;
  }
  return r;
}

}  // namespace topomap
