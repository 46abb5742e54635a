#include "topomap/passages.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "topomap/disjoint_set.hpp"
#include "topomap/error.hpp"

namespace topomap {

std::array<LatticePoint, 4> Face::corners() const {
  if (axis == 0) {
    return {LatticePoint{ix + 1, iy, iz}, LatticePoint{ix + 1, iy + 1, iz}, LatticePoint{ix + 1, iy + 1, iz + 1},
            LatticePoint{ix + 1, iy, iz + 1}};
  }
  return {LatticePoint{ix, iy + 1, iz}, LatticePoint{ix + 1, iy + 1, iz}, LatticePoint{ix + 1, iy + 1, iz + 1},
          LatticePoint{ix, iy + 1, iz + 1}};
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::vector<std::vector<std::size_t>> cluster_contact_points(std::span<const Vec3> points, double d_th) {
  if (!(d_th > 0.0)) throw Error(ErrorCode::InvalidArgument, "d_th must be positive");
  const std::size_t n = points.size();
  DisjointSet ds(n);
  if (n == 0) return {};
  // Hash cells of edge d_th: linked pairs lie in the same or adjacent cells.
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells;
  std::vector<CellKey> key(n);
  for (std::size_t i = 0; i < n; ++i) {
    key[i] = {static_cast<std::int64_t>(std::floor(points[i].x / d_th)),
              static_cast<std::int64_t>(std::floor(points[i].y / d_th)),
              static_cast<std::int64_t>(std::floor(points[i].z / d_th))};
    cells[key[i]].push_back(i);
  }
  const double d2 = d_th * d_th;
  for (std::size_t i = 0; i < n; ++i) {
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = cells.find({key[i].x + dx, key[i].y + dy, key[i].z + dz});
          if (it == cells.end()) continue;
          for (std::size_t j : it->second) {
            if (j <= i) continue;
            if (squared_distance(points[i], points[j]) < d2) ds.unite(i, j);
          }
        }
  }
  return groups(ds);
}

std::vector<Passage> passages_from_faces(int a, int b, std::vector<Face> faces, double d_th_lattice) {
  if (a > b) std::swap(a, b);
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  std::vector<LatticePoint> pts;
  pts.reserve(faces.size() * 4);
  for (const Face& f : faces)
    for (const LatticePoint& p : f.corners()) pts.push_back(p);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  std::vector<Vec3> coords(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) coords[i] = {double(pts[i].x), double(pts[i].y), double(pts[i].z)};
  const auto clusters = cluster_contact_points(coords, d_th_lattice);

  std::vector<std::size_t> cluster_of(pts.size());
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t i : clusters[c]) cluster_of[i] = c;

  std::vector<Passage> out(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    out[c].a = a;
    out[c].b = b;
    for (std::size_t i : clusters[c]) out[c].points.push_back(pts[i]);
  }
  for (const Face& f : faces) {
    const LatticePoint p = f.corners()[0];
    const std::size_t idx = static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), p) - pts.begin());
    out[cluster_of[idx]].faces.push_back(f);
  }
  // A cluster of corners always carries at least one whole face, since the
  // corners of one face are within one lattice unit of each other.
  for (const Passage& p : out)
    if (p.faces.empty()) throw Error(ErrorCode::Internal, "passage cluster without faces");
  return out;
}

std::vector<Passage> build_passages(FaceMap faces, double d_th_lattice) {
  std::vector<Passage> out;
  for (auto& [pair, list] : faces) {
    auto part = passages_from_faces(pair.first, pair.second, std::move(list), d_th_lattice);
    for (auto& p : part) out.push_back(std::move(p));
  }
  return out;
}

FaceMap contact_faces(const ColumnField& field, std::span<const int> owner_of) {
  if (owner_of.size() != field.size()) throw Error(ErrorCode::Internal, "owner map size mismatch");
  const GridMeta& meta = field.meta();
  FaceMap faces;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Column& c = field[i];
    for (int axis = 0; axis < 2; ++axis) {
      const int nx = c.ix + (axis == 0 ? 1 : 0);
      const int ny = c.iy + (axis == 1 ? 1 : 0);
      if (!meta.in_bounds(nx, ny)) continue;
      const std::size_t first = field.first_index(nx, ny);
      const auto list = field.at(nx, ny);
      for (std::size_t k = 0; k < list.size(); ++k) {
        const Column& n = list[k];
        if (n.z1 > c.z2) break;
        if (n.z2 < c.z1) continue;
        const int oa = owner_of[i];
        const int ob = owner_of[first + k];
        if (oa == ob) continue;
        auto& dst = faces[{std::min(oa, ob), std::max(oa, ob)}];
        for (int z = std::max(c.z1, n.z1); z <= std::min(c.z2, n.z2); ++z) dst.push_back(Face{axis, c.ix, c.iy, z});
      }
    }
  }
  return faces;
}

VolumeGraph generate_passages(const ColumnField& field, std::span<const int> volume_of, std::size_t volume_count,
                              double d_th) {
  if (!(d_th > 0.0)) throw Error(ErrorCode::InvalidArgument, "d_th must be positive");
  VolumeGraph g;
  g.vertex_count = volume_count;
  g.edges = build_passages(contact_faces(field, volume_of), d_th / field.meta().voxel);
  return g;
}

std::vector<Vec3> passage_points_m(const Passage& p, const GridMeta& meta) {
  std::vector<Vec3> out;
  out.reserve(p.points.size());
  for (const LatticePoint& q : p.points) out.push_back(meta.lattice_to_metric(q));
  return out;
}

}  // namespace topomap
