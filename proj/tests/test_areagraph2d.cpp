#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "oracles.hpp"
#include "test_util.hpp"
#include "topomap/areagraph2d.hpp"
#include "topomap/subdivide.hpp"

using namespace topomap;

namespace {

// Free boxes are inclusive cell ranges {x0, y0, x1, y1}.
GridMap2D boxes_map(int w, int h, const std::vector<std::array<int, 4>>& boxes, double res = 0.15) {
  GridMap2D m;
  m.width = w;
  m.height = h;
  m.resolution = res;
  m.free.assign(static_cast<std::size_t>(w) * h, 0);
  for (const auto& b : boxes)
    for (int y = b[1]; y <= b[3]; ++y)
      for (int x = b[0]; x <= b[2]; ++x) m.free[static_cast<std::size_t>(m.index(x, y))] = 1;
  return m;
}

double brute_dist2(const GridMap2D& m, int cell) {
  double best = std::numeric_limits<double>::infinity();
  const int x = m.x_of(cell), y = m.y_of(cell);
  for (int i = 0; i < static_cast<int>(m.size()); ++i)
    if (!m.free[static_cast<std::size_t>(i)]) {
      const double dx = m.x_of(i) - x, dy = m.y_of(i) - y;
      best = std::min(best, dx * dx + dy * dy);
    }
  return best;
}

GridMap2D plus_map() {
  // Arms 5 cells wide, 20 long, around a 5x5 centre.
  return boxes_map(47, 47, {{1, 21, 45, 25}, {21, 1, 25, 45}});
}

std::set<int> labels_in(const AreaGraph2D& ag, const GridMap2D& m) {
  std::set<int> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.free[i]) out.insert(ag.label[i]);
  return out;
}

bool is_partition(const AreaGraph2D& ag, const GridMap2D& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.free[i] && (ag.label[i] < 1 || ag.label[i] > ag.area_count)) return false;
    if (!m.free[i] && ag.label[i] != 0) return false;
  }
  return static_cast<int>(labels_in(ag, m).size()) == ag.area_count;
}


}  // namespace

TEST_CASE("projection of a 3x3 block and an L shape") {
  GridMeta meta;
  meta.voxel = 0.15;
  meta.nx = meta.ny = 10;
  meta.nz = 10;
  std::vector<Column> cols;
  for (int x = 3; x < 6; ++x)
    for (int y = 4; y < 7; ++y) cols.push_back({x, y, 1, 5});
  const ColumnField f(meta, cols);
  std::vector<std::uint32_t> all(f.size());
  std::iota(all.begin(), all.end(), 0u);
  const GridMap2D m = project_region(f, all);
  CHECK(m.width == 5);
  CHECK(m.height == 5);
  CHECK(m.free_count() == 9);
  CHECK(m.offset_x == 2);
  CHECK(m.offset_y == 3);
  for (int x = 0; x < 5; ++x) CHECK(!m.is_free(x, 0));

  std::vector<Column> l;
  for (int x = 1; x < 6; ++x) l.push_back({x, 1, 1, 5});
  for (int y = 2; y < 6; ++y) l.push_back({1, y, 1, 5});
  std::sort(l.begin(), l.end());
  const ColumnField fl(meta, l);
  std::vector<std::uint32_t> idx(fl.size());
  std::iota(idx.begin(), idx.end(), 0u);
  const GridMap2D ml = project_region(fl, idx);
  CHECK(ml.free_count() == 9);
  for (const Column& c : fl.columns()) CHECK(ml.is_free(c.ix - ml.offset_x, c.iy - ml.offset_y));
}

TEST_CASE("distance transform equals brute force on random maps") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    std::mt19937 rng(seed);
    const int w = 8 + static_cast<int>(rng() % 57), h = 8 + static_cast<int>(rng() % 57);
    GridMap2D m = boxes_map(w, h, {{1, 1, w - 2, h - 2}});
    for (int k = 0; k < w * h / 20; ++k) m.free[rng() % m.size()] = 0;
    const DistanceField df = distance_transform(m);
    for (int i = 0; i < static_cast<int>(m.size()); ++i) {
      const double want = brute_dist2(m, i);
      CHECK(df.dist2[static_cast<std::size_t>(i)] == want);
      const int s = df.site[static_cast<std::size_t>(i)];
      const double dx = m.x_of(s) - m.x_of(i), dy = m.y_of(s) - m.y_of(i);
      CHECK(dx * dx + dy * dy == want);
    }
  }
}

TEST_CASE("voronoi: corridor centre line, disk centre, exact clearances") {
  const GridMap2D corridor = boxes_map(30, 3, {{1, 1, 28, 1}});
  const VoronoiDiagram2D vc = voronoi(corridor);
  for (int x = 3; x <= 26; ++x) CHECK(vc.waypoint_at[static_cast<std::size_t>(corridor.index(x, 1))] >= 0);

  GridMap2D disk = boxes_map(41, 41, {});
  for (int y = 0; y < 41; ++y)
    for (int x = 0; x < 41; ++x)
      if ((x - 20) * (x - 20) + (y - 20) * (y - 20) <= 17 * 17) disk.free[static_cast<std::size_t>(disk.index(x, y))] = 1;
  const VoronoiDiagram2D vd = voronoi(disk);
  CHECK(vd.waypoint_at[static_cast<std::size_t>(disk.index(20, 20))] >= 0);

  const GridMap2D room = boxes_map(40, 30, {{1, 1, 38, 28}});
  const VoronoiDiagram2D vr = voronoi(room);
  CHECK(!vr.waypoints.empty());
  for (const Waypoint& w : vr.waypoints) {
    CHECK(w.clearance * w.clearance == doctest::Approx(brute_dist2(room, w.cell)));
    CHECK(w.site_a != w.site_b);
  }
}

TEST_CASE("topology: plus, single corridor, pruned nub") {
  const TopologyGraph2D plus = topology_graph(voronoi(plus_map()));
  int junctions = 0, ends = 0;
  for (const TopoVertex& v : plus.vertices) {
    if (v.junction) ++junctions;
    if (v.degree == 1) ++ends;
  }
  CHECK(junctions == 1);
  CHECK(ends == 4);
  CHECK(plus.edges.size() == 4);

  const GridMap2D clean = boxes_map(40, 7, {{1, 1, 38, 5}});
  const TopologyGraph2D tc = topology_graph(voronoi(clean));
  CHECK(tc.vertices.size() == 2);
  CHECK(tc.edges.size() == 1);

  GridMap2D nub = clean;
  nub.free[static_cast<std::size_t>(nub.index(20, 6))] = 1;
  nub.free[static_cast<std::size_t>(nub.index(21, 6))] = 1;
  const TopologyGraph2D tn = topology_graph(voronoi(nub), 4);
  CHECK(tn.vertices.size() == tc.vertices.size());
  CHECK(tn.edges.size() == tc.edges.size());
}

TEST_CASE("area graph: single corridor, plus shape, two rooms and a corridor") {
  const GridMap2D clean = boxes_map(40, 7, {{1, 1, 38, 5}});
  const AreaGraph2D one = area_graph(topology_graph(voronoi(clean)), clean);
  CHECK(one.area_count == 1);
  CHECK(one.passages.empty());
  CHECK(is_partition(one, clean));

  // The junction area touches all four arms and is absorbed by one of them.
  const GridMap2D plus = plus_map();
  const AreaGraph2D ap = area_graph(topology_graph(voronoi(plus)), plus);
  CHECK(ap.area_count == 4);
  CHECK(ap.passages.size() == 3);
  CHECK(is_partition(ap, plus));

  // Two 6 m rooms joined by a 1.05 m wide, 3 m long corridor.
  const GridMap2D rooms = boxes_map(102, 42, {{1, 1, 40, 40}, {41, 18, 60, 24}, {61, 1, 100, 40}});
  const AreaGraph2D ar = area_graph(topology_graph(voronoi(rooms)), rooms);
  CHECK(is_partition(ar, rooms));
  const AreaGraph2D merged = alpha_shape_merge(ar, rooms, 2.5);
  CHECK(merged.area_count == 3);
  CHECK(merged.passages.size() == 2);
  CHECK(merged.label[static_cast<std::size_t>(rooms.index(20, 20))] != merged.label[static_cast<std::size_t>(rooms.index(80, 20))]);
}

TEST_CASE("alpha shape edges equal the all-pairs empty-circle oracle") {
  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto sq = alpha_shape_edges(square, 1.2);
  CHECK(sq == oracle::brute_alpha(square, 1.2));
  std::set<std::pair<int, int>> got(sq.begin(), sq.end());
  for (auto e : {std::pair{0, 1}, std::pair{1, 2}, std::pair{2, 3}, std::pair{0, 3}}) CHECK(got.count(e) == 1);
  for (unsigned seed = 0; seed < 30; ++seed) {
    std::mt19937 rng(seed);
    std::vector<Vec2> pts;
    const int n = 3 + static_cast<int>(rng() % 198);
    const bool lattice = seed % 3 == 0;
    for (int i = 0; i < n; ++i) {
      if (lattice) pts.push_back({0.15 * static_cast<int>(rng() % 30), 0.15 * static_cast<int>(rng() % 30)});
      else pts.push_back({testutil::uniform(rng, 0, 5), testutil::uniform(rng, 0, 5)});
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double alpha = testutil::uniform(rng, 0.2, 2.0);
    CAPTURE(seed);
    CHECK(alpha_shape_edges(pts, alpha) == oracle::brute_alpha(pts, alpha));
  }
}

TEST_CASE("alpha merge: oversegmented room fuses; rooms behind a narrow door stay apart") {
  const GridMap2D room = boxes_map(42, 42, {{1, 1, 40, 40}});
  AreaGraph2D split;
  split.width = room.width;
  split.height = room.height;
  split.area_count = 3;
  split.label.assign(room.size(), 0);
  for (int y = 1; y <= 40; ++y)
    for (int x = 1; x <= 40; ++x) split.label[static_cast<std::size_t>(room.index(x, y))] = x <= 13 ? 1 : (x <= 26 ? 2 : 3);
  normalize_areas(split);
  CHECK(split.passages.size() == 2);
  const AreaGraph2D fused = alpha_shape_merge(split, room, 2.5);
  CHECK(fused.area_count == 1);
  CHECK(fused.passages.empty());

  // Two 6 m rooms through a 0.9 m (6 cell) gap in a shared wall.
  const GridMap2D two = boxes_map(83, 42, {{1, 1, 40, 40}, {42, 1, 81, 40}, {41, 18, 41, 23}});
  AreaGraph2D halves;
  halves.width = two.width;
  halves.height = two.height;
  halves.area_count = 2;
  halves.label.assign(two.size(), 0);
  for (std::size_t i = 0; i < two.size(); ++i)
    if (two.free[i]) halves.label[i] = two.x_of(static_cast<int>(i)) <= 41 ? 1 : 2;
  normalize_areas(halves);
  const AreaGraph2D kept = alpha_shape_merge(halves, two, 2.5);
  CHECK(kept.area_count == 2);
  CHECK(kept.passages.size() == 1);

  const AreaGraph2D noop = alpha_shape_merge(split, room, 0.2);
  CHECK(noop.area_count == 3);
  CHECK(!noop.warnings.empty());
}

TEST_CASE("subdivide_region: one label is identity, straddling volume splits") {
  GridMeta meta;
  meta.voxel = 0.15;
  meta.nx = 12;
  meta.ny = 5;
  meta.nz = 20;
  std::vector<Column> cols;
  for (int x = 1; x <= 10; ++x)
    for (int y = 1; y <= 3; ++y) cols.push_back({x, y, 1, 15});
  const ColumnField f(meta, cols);
  const VolumeSet vs = grow_volumes(f, 0.1);
  REQUIRE(vs.volumes.size() == 1);
  Region region;
  region.volumes = {0};
  std::vector<std::uint32_t> all(f.size());
  std::iota(all.begin(), all.end(), 0u);
  const GridMap2D map = project_region(f, all);
  std::vector<int> one(map.size(), 0);
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map.free[i]) one[i] = 1;
  const RegionSplit s1 = subdivide_region(f, vs, region, map, one);
  REQUIRE(s1.pieces.size() == 1);
  CHECK(s1.pieces[0] == vs.volumes[0].columns);

  std::vector<int> two(map.size(), 0);
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map.free[i]) two[i] = map.x_of(static_cast<int>(i)) + map.offset_x <= 4 ? 1 : 2;
  const RegionSplit s2 = subdivide_region(f, vs, region, map, two);
  REQUIRE(s2.pieces.size() == 2);
  CHECK(s2.pieces[0].size() + s2.pieces[1].size() == f.size());
  CHECK(s2.pieces[0].size() == 12);
}
