#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "topomap/columns.hpp"
#include "topomap/geometry.hpp"

namespace topomap {

// Vertical voxel face between cell (ix, iy) and its +x (axis 0) or +y
// (axis 1) neighbour, at layer iz.
struct Face {
  int axis = 0;
  int ix = 0;
  int iy = 0;
  int iz = 0;

  std::array<LatticePoint, 4> corners() const;
  // The two cells the face separates, lower cell first.
  std::array<int, 2> cell_a() const { return {ix, iy}; }
  std::array<int, 2> cell_b() const { return axis == 0 ? std::array<int, 2>{ix + 1, iy} : std::array<int, 2>{ix, iy + 1}; }

  friend bool operator==(const Face&, const Face&) = default;
  friend auto operator<=>(const Face&, const Face&) = default;
};

struct Passage {
  int a = 0;  // a < b
  int b = 0;
  std::vector<Face> faces;            // sorted
  std::vector<LatticePoint> points;   // union of face corners, sorted

  friend bool operator==(const Passage&, const Passage&) = default;
};

// Edges sorted by (a, b), then by smallest contact point.
struct VolumeGraph {
  std::size_t vertex_count = 0;
  std::vector<Passage> edges;
};

// Single-linkage components under Euclidean distance < d_th. Returns clusters
// of input indices, each ascending, ordered by smallest member.
std::vector<std::vector<std::size_t>> cluster_contact_points(std::span<const Vec3> points, double d_th);

// Splits a face set between one pair into passages by clustering the corners.
// d_th_lattice is the linkage distance in voxel units.
std::vector<Passage> passages_from_faces(int a, int b, std::vector<Face> faces, double d_th_lattice);

using FaceMap = std::map<std::pair<int, int>, std::vector<Face>>;

// Groups raw contact faces into one or more passages per pair.
std::vector<Passage> build_passages(FaceMap faces, double d_th_lattice);

// Contact faces between columns with different owner ids, keyed by the
// normalized owner pair. owner_of is indexed by column.
FaceMap contact_faces(const ColumnField& field, std::span<const int> owner_of);

VolumeGraph generate_passages(const ColumnField& field, std::span<const int> volume_of, std::size_t volume_count,
                              double d_th);

// Metric corner positions of a passage.
std::vector<Vec3> passage_points_m(const Passage& p, const GridMeta& meta);

}  // namespace topomap
