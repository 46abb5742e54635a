#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <unordered_map>

#include "topomap/areagraph2d.hpp"
#include "topomap/disjoint_set.hpp"
#include "topomap/error.hpp"

namespace topomap {

namespace {

struct GridIndex {
  double cell;
  std::unordered_map<std::int64_t, std::vector<int>> buckets;

  static std::int64_t key(std::int64_t x, std::int64_t y) { return (x << 32) ^ (y & 0xffffffff); }
  std::int64_t cx(double v) const { return static_cast<std::int64_t>(std::floor(v / cell)); }

  GridIndex(std::span<const Vec2> pts, double c) : cell(c) {
    for (std::size_t i = 0; i < pts.size(); ++i) buckets[key(cx(pts[i].x), cx(pts[i].y))].push_back(static_cast<int>(i));
  }

  template <typename Fn>
  void around(double x, double y, Fn&& fn) const {
    const std::int64_t bx = cx(x), by = cx(y);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = buckets.find(key(bx + dx, by + dy));
        if (it == buckets.end()) continue;
        for (int i : it->second)
          if (!fn(i)) return;
      }
  }
};

}  // namespace

std::vector<std::pair<int, int>> alpha_shape_edges(std::span<const Vec2> points, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  const double r = 0.5 * alpha;
  const double tol = 1e-9 * std::max(1.0, alpha);
  GridIndex grid(points, alpha);
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2 p = points[i];
    std::vector<int> cand;
    grid.around(p.x, p.y, [&](int j) {
      if (j > static_cast<int>(i)) cand.push_back(j);
      return true;
    });
    std::sort(cand.begin(), cand.end());
    for (int j : cand) {
      const Vec2 q = points[static_cast<std::size_t>(j)];
      const double dx = q.x - p.x, dy = q.y - p.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 == 0.0 || d2 > alpha * alpha) continue;
      const double d = std::sqrt(d2);
      const double h = std::sqrt(std::max(0.0, r * r - 0.25 * d2));
      const double mx = 0.5 * (p.x + q.x), my = 0.5 * (p.y + q.y);
      const double ux = -dy / d, uy = dx / d;
      bool edge = false;
      for (int s = -1; s <= 1 && !edge; s += 2) {
        const double cx = mx + s * h * ux, cy = my + s * h * uy;
        bool empty = true;
        grid.around(cx, cy, [&](int k) {
          if (k == static_cast<int>(i) || k == j) return true;
          const Vec2 o = points[static_cast<std::size_t>(k)];
          const double ex = o.x - cx, ey = o.y - cy;
          if (std::sqrt(ex * ex + ey * ey) < r - tol) {
            empty = false;
            return false;
          }
          return true;
        });
        edge = empty;
      }
      if (edge) out.emplace_back(static_cast<int>(i), j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

AreaGraph2D alpha_shape_merge(const AreaGraph2D& ag, const GridMap2D& map, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  AreaGraph2D out = ag;
  if (alpha < 2.0 * map.resolution) {
    out.warnings.push_back("alpha is smaller than two cells; alpha-shape merge skipped");
    return out;
  }
  const double radius = 0.5 * alpha / map.resolution;  // cells
  const double r2 = radius * radius;
  const DistanceField df = distance_transform(map);

  // Disk centres: free cells whose clearance admits the whole disk.
  std::vector<char> centre(map.size(), 0);
  for (std::size_t i = 0; i < map.size(); ++i) centre[i] = map.free[i] && df.dist2[i] >= r2;
  std::vector<int> comp(map.size(), -1);
  int ncomp = 0;
  for (std::size_t s = 0; s < map.size(); ++s) {
    if (!centre[s] || comp[s] >= 0) continue;
    std::deque<int> q{static_cast<int>(s)};
    comp[s] = ncomp;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      const int ux = map.x_of(u), uy = map.y_of(u);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!map.in_bounds(ux + dx, uy + dy)) continue;
          const auto w = static_cast<std::size_t>(map.index(ux + dx, uy + dy));
          if (!centre[w] || comp[w] >= 0) continue;
          comp[w] = ncomp;
          q.push_back(static_cast<int>(w));
        }
    }
    ++ncomp;
  }
  if (ncomp == 0) return out;

  // Swept cells per component, counted per area.
  const int reach = static_cast<int>(std::floor(radius));
  std::vector<std::array<int, 2>> disk;
  for (int dy = -reach; dy <= reach; ++dy)
    for (int dx = -reach; dx <= reach; ++dx)
      if (dx * dx + dy * dy <= r2) disk.push_back({dx, dy});
  std::vector<int> stamp(map.size(), -1);
  std::vector<std::vector<std::size_t>> covered(static_cast<std::size_t>(ncomp),
                                                std::vector<std::size_t>(static_cast<std::size_t>(ag.area_count) + 1, 0));
  for (std::size_t s = 0; s < map.size(); ++s) {
    if (comp[s] < 0) continue;
    const int c = comp[s];
    const int sx = map.x_of(static_cast<int>(s)), sy = map.y_of(static_cast<int>(s));
    for (const auto& d : disk) {
      if (!map.is_free(sx + d[0], sy + d[1])) continue;
      const auto w = static_cast<std::size_t>(map.index(sx + d[0], sy + d[1]));
      if (stamp[w] == c) continue;
      stamp[w] = c;
      ++covered[static_cast<std::size_t>(c)][static_cast<std::size_t>(ag.label[w])];
    }
  }
  std::vector<std::size_t> area_size(static_cast<std::size_t>(ag.area_count) + 1, 0);
  for (int l : ag.label) ++area_size[static_cast<std::size_t>(l)];

  DisjointSet ds(static_cast<std::size_t>(ag.area_count) + static_cast<std::size_t>(ncomp) + 1);
  for (int a = 1; a <= ag.area_count; ++a) {
    int best = -1;
    std::size_t best_cov = 0;
    for (int c = 0; c < ncomp; ++c) {
      const std::size_t cov = covered[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)];
      if (cov > best_cov) best = c, best_cov = cov;
    }
    if (best >= 0 && 2 * best_cov >= area_size[static_cast<std::size_t>(a)])
      ds.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(ag.area_count + 1 + best));
  }
  // Relabel each area with the smallest area label in its group.
  std::vector<int> rep(static_cast<std::size_t>(ag.area_count) + static_cast<std::size_t>(ncomp) + 1, 0);
  for (int a = 1; a <= ag.area_count; ++a) {
    const std::size_t root = ds.find(static_cast<std::size_t>(a));
    if (!rep[root]) rep[root] = a;
  }
  for (int& l : out.label)
    if (l) l = rep[ds.find(static_cast<std::size_t>(l))];
  normalize_areas(out);
  return out;
}

AreaGraph2D segment_map(const GridMap2D& map, const SegmentParams& params) {
  const VoronoiDiagram2D vd = voronoi(map, params.voronoi);
  const TopologyGraph2D tg = topology_graph(vd, params.area.prune_length);
  const AreaGraph2D ag = area_graph(tg, map, params.area);
  return alpha_shape_merge(ag, map, params.alpha);
}

}  // namespace topomap
