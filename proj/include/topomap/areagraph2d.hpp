#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topomap/columns.hpp"
#include "topomap/geometry.hpp"

namespace topomap {

// Row-major 2D free/occupied map; cell (x, y) is index y * width + x.
struct GridMap2D {
  int width = 0;
  int height = 0;
  double resolution = 0.0;
  int offset_x = 0;  // storey-grid (ix, iy) of cell (0, 0)
  int offset_y = 0;
  std::vector<std::uint8_t> free;  // 1 = free

  std::size_t size() const { return free.size(); }
  int index(int x, int y) const { return y * width + x; }
  int x_of(int i) const { return i % width; }
  int y_of(int i) const { return i / width; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool is_free(int x, int y) const { return in_bounds(x, y) && free[static_cast<std::size_t>(index(x, y))] != 0; }
  std::size_t free_count() const;
};

// Marks the (ix, iy) of the given columns free, cropped to their bounds plus
// a one-cell occupied border.
GridMap2D project_region(const ColumnField& field, std::span<const std::uint32_t> columns);

// Exact squared Euclidean distance (in cells) from every cell to its nearest
// occupied cell, with that cell's index. Occupied cells have distance 0 and
// are their own site. With no occupied cell, site is -1.
struct DistanceField {
  std::vector<double> dist2;
  std::vector<int> site;
};
DistanceField distance_transform(const GridMap2D& map);

struct Waypoint {
  int cell = 0;
  int site_a = 0;  // nearest occupied cell of this waypoint
  int site_b = 0;  // opposing site
  double clearance = 0.0;  // distance to site_a, cells
};

struct VoronoiDiagram2D {
  int width = 0;
  int height = 0;
  std::vector<Waypoint> waypoints;  // ascending cell
  std::vector<int> waypoint_at;     // per cell, -1 if none
};

struct VoronoiParams {
  // Minimum angle (degrees) subtended by two sites at a skeleton cell.
  double min_site_angle_deg = 120.0;
};

VoronoiDiagram2D voronoi(const GridMap2D& map, const VoronoiParams& params = {});

struct TopoVertex {
  std::vector<int> cells;  // ascending
  int degree = 0;          // number of incident edge ends
  bool junction = false;
};

struct TopoEdge {
  int v0 = 0;
  int v1 = 0;
  std::vector<int> chain;  // waypoint cells strictly between the vertices, ordered v0 -> v1
};

struct TopologyGraph2D {
  int width = 0;
  int height = 0;
  std::vector<int> skeleton;  // surviving waypoint cells, ascending
  std::vector<TopoVertex> vertices;
  std::vector<TopoEdge> edges;
  VoronoiDiagram2D diagram;  // pruned
};

TopologyGraph2D topology_graph(const VoronoiDiagram2D& vd, int prune_length = 4);

struct AreaPassage2D {
  int a = 0;  // labels, a < b
  int b = 0;
  // Unit boundary segments between the two areas, in cell-corner coordinates
  // of the map, sorted.
  std::vector<std::array<int, 4>> segments;
};

struct AreaGraph2D {
  int width = 0;
  int height = 0;
  int area_count = 0;
  std::vector<int> label;  // per cell, 0 on occupied cells, 1..area_count on free cells
  std::vector<AreaPassage2D> passages;
  std::vector<std::string> warnings;
};

struct AreaGraphParams {
  int prune_length = 4;
  double constriction_ratio = 0.9;  // interior minimum must be below this fraction of both sides' maxima
};

AreaGraph2D area_graph(const TopologyGraph2D& tg, const GridMap2D& map, const AreaGraphParams& params = {});

// Renumbers labels 1..n in order of first cell and recomputes passages.
void normalize_areas(AreaGraph2D& ag);

// Edges (i, j), i < j, of the alpha-shape: |pi - pj| <= alpha and at least one
// of the two circles of diameter alpha through both points has no other
// point strictly inside.
std::vector<std::pair<int, int>> alpha_shape_edges(std::span<const Vec2> points, double alpha);

// Merges all areas covered at least half by one connected region swept by
// disks of diameter alpha (in metres) that fit in free space.
AreaGraph2D alpha_shape_merge(const AreaGraph2D& ag, const GridMap2D& map, double alpha);

// Full chain: voronoi -> topology graph -> area graph -> alpha merge.
struct SegmentParams {
  VoronoiParams voronoi;
  AreaGraphParams area;
  double alpha = 2.5;
};
AreaGraph2D segment_map(const GridMap2D& map, const SegmentParams& params);

}  // namespace topomap
