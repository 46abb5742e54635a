#include "topomap/areagraph2d.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "topomap/disjoint_set.hpp"
#include "topomap/error.hpp"

namespace topomap {

std::size_t GridMap2D::free_count() const {
  return static_cast<std::size_t>(std::count(free.begin(), free.end(), std::uint8_t{1}));
}

GridMap2D project_region(const ColumnField& field, std::span<const std::uint32_t> columns) {
  if (columns.empty()) throw Error(ErrorCode::InvalidArgument, "cannot project an empty region");
  int x0 = std::numeric_limits<int>::max(), y0 = x0;
  int x1 = std::numeric_limits<int>::min(), y1 = x1;
  for (std::uint32_t c : columns) {
    x0 = std::min(x0, field[c].ix);
    y0 = std::min(y0, field[c].iy);
    x1 = std::max(x1, field[c].ix);
    y1 = std::max(y1, field[c].iy);
  }
  GridMap2D m;
  m.width = x1 - x0 + 3;
  m.height = y1 - y0 + 3;
  m.resolution = field.meta().voxel;
  m.offset_x = x0 - 1;
  m.offset_y = y0 - 1;
  m.free.assign(static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height), 0);
  for (std::uint32_t c : columns)
    m.free[static_cast<std::size_t>(m.index(field[c].ix - m.offset_x, field[c].iy - m.offset_y))] = 1;
  return m;
}

DistanceField distance_transform(const GridMap2D& map) {
  const int w = map.width, h = map.height;
  const std::size_t n = map.size();
  constexpr int kNone = std::numeric_limits<int>::max();
  // Pass 1: per column, nearest occupied row.
  std::vector<int> near_y(n, kNone);
  for (int x = 0; x < w; ++x) {
    int last = kNone;
    for (int y = 0; y < h; ++y) {
      if (!map.is_free(x, y)) last = y;
      near_y[static_cast<std::size_t>(map.index(x, y))] = last;
    }
    last = kNone;
    for (int y = h - 1; y >= 0; --y) {
      if (!map.is_free(x, y)) last = y;
      auto& cur = near_y[static_cast<std::size_t>(map.index(x, y))];
      if (last != kNone && (cur == kNone || last - y < y - cur)) cur = last;
    }
  }
  // Pass 2: per row, lower envelope of parabolas.
  DistanceField out;
  out.dist2.assign(n, std::numeric_limits<double>::infinity());
  out.site.assign(n, -1);
  std::vector<int> v(static_cast<std::size_t>(w));
  std::vector<double> z(static_cast<std::size_t>(w) + 1);
  std::vector<double> f(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    int k = -1;
    for (int q = 0; q < w; ++q) {
      const int ny = near_y[static_cast<std::size_t>(map.index(q, y))];
      if (ny == kNone) continue;
      const double fq = static_cast<double>(ny - y) * (ny - y);
      f[static_cast<std::size_t>(q)] = fq;
      while (k >= 0) {
        const int p = v[static_cast<std::size_t>(k)];
        const double s = ((fq + double(q) * q) - (f[static_cast<std::size_t>(p)] + double(p) * p)) / (2.0 * (q - p));
        if (s <= z[static_cast<std::size_t>(k)]) {
          --k;
        } else {
          break;
        }
      }
      if (k < 0) {
        k = 0;
        v[0] = q;
        z[0] = -std::numeric_limits<double>::infinity();
      } else {
        const int p = v[static_cast<std::size_t>(k)];
        const double s = ((fq + double(q) * q) - (f[static_cast<std::size_t>(p)] + double(p) * p)) / (2.0 * (q - p));
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
      }
      z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
    }
    if (k < 0) continue;
    int j = 0;
    for (int x = 0; x < w; ++x) {
      while (z[static_cast<std::size_t>(j) + 1] < x) ++j;
      const int p = v[static_cast<std::size_t>(j)];
      const std::size_t i = static_cast<std::size_t>(map.index(x, y));
      out.dist2[i] = double(x - p) * (x - p) + f[static_cast<std::size_t>(p)];
      out.site[i] = map.index(p, near_y[static_cast<std::size_t>(map.index(p, y))]);
    }
  }
  return out;
}

VoronoiDiagram2D voronoi(const GridMap2D& map, const VoronoiParams& params) {
  VoronoiDiagram2D vd;
  vd.width = map.width;
  vd.height = map.height;
  vd.waypoint_at.assign(map.size(), -1);
  const DistanceField df = distance_transform(map);
  const double cos_limit = std::cos(params.min_site_angle_deg * std::numbers::pi / 180.0);
  std::vector<int> other(map.size(), -1);

  auto consider = [&](int c, int n) {
    const int sc = df.site[static_cast<std::size_t>(c)];
    const int sn = df.site[static_cast<std::size_t>(n)];
    if (sc < 0 || sn < 0 || sc == sn) return;
    const int scx = map.x_of(sc), scy = map.y_of(sc);
    const int snx = map.x_of(sn), sny = map.y_of(sn);
    if (std::abs(scx - snx) <= 1 && std::abs(scy - sny) <= 1) return;
    const double mx = 0.5 * (map.x_of(c) + map.x_of(n));
    const double my = 0.5 * (map.y_of(c) + map.y_of(n));
    const double ax = scx - mx, ay = scy - my, bx = snx - mx, by = sny - my;
    const double cosang = (ax * bx + ay * by) / std::sqrt((ax * ax + ay * ay) * (bx * bx + by * by));
    if (cosang > cos_limit + 1e-12) return;
    auto bis = [&](int p) {
      const double px = map.x_of(p), py = map.y_of(p);
      return std::abs(((px - scx) * (px - scx) + (py - scy) * (py - scy)) -
                      ((px - snx) * (px - snx) + (py - sny) * (py - sny)));
    };
    const double fc = bis(c), fn = bis(n);
    // An occupied partner is its own site and never a waypoint.
    const bool n_free = map.free[static_cast<std::size_t>(n)] != 0;
    const int pick = (!n_free || fc < fn || (fc == fn && c < n)) ? c : n;
    if (other[static_cast<std::size_t>(pick)] >= 0) return;
    other[static_cast<std::size_t>(pick)] = pick == c ? sn : sc;
  };

  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      if (!map.is_free(x, y)) continue;
      const int c = map.index(x, y);
      if (map.is_free(x + 1, y)) consider(c, map.index(x + 1, y));
      if (map.is_free(x, y + 1)) consider(c, map.index(x, y + 1));
      if (map.is_free(x + 1, y + 1)) consider(c, map.index(x + 1, y + 1));
      if (map.is_free(x - 1, y + 1)) consider(c, map.index(x - 1, y + 1));
      static constexpr int d4[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
      for (const auto& d : d4)
        if (map.in_bounds(x + d[0], y + d[1]) && !map.is_free(x + d[0], y + d[1]))
          consider(c, map.index(x + d[0], y + d[1]));
    }
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (other[i] < 0) continue;
    vd.waypoint_at[i] = static_cast<int>(vd.waypoints.size());
    vd.waypoints.push_back(Waypoint{static_cast<int>(i), df.site[i], other[i], std::sqrt(df.dist2[i])});
  }
  return vd;
}

}  // namespace topomap

namespace topomap {

namespace {

// Skeleton adjacency: 4-neighbours, plus diagonal neighbours not already
// reachable through a shared 4-neighbour.
class Skeleton {
public:
  Skeleton(int w, int h, std::vector<char> in) : w_(w), h_(h), in_(std::move(in)) {}

  bool has(int x, int y) const { return x >= 0 && y >= 0 && x < w_ && y < h_ && in_[static_cast<std::size_t>(y * w_ + x)]; }
  bool has(int i) const { return in_[static_cast<std::size_t>(i)] != 0; }
  void remove(int i) { in_[static_cast<std::size_t>(i)] = 0; }

  int neighbours(int i, int out[8]) const {
    const int x = i % w_, y = i / w_;
    int k = 0;
    static constexpr int d4[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (const auto& d : d4)
      if (has(x + d[0], y + d[1])) out[k++] = (y + d[1]) * w_ + x + d[0];
    static constexpr int dd[4][2] = {{-1, -1}, {1, -1}, {-1, 1}, {1, 1}};
    for (const auto& d : dd) {
      if (!has(x + d[0], y + d[1])) continue;
      if (has(x + d[0], y) || has(x, y + d[1])) continue;
      out[k++] = (y + d[1]) * w_ + x + d[0];
    }
    return k;
  }

  int degree(int i) const {
    int tmp[8];
    return neighbours(i, tmp);
  }

  std::vector<int> cells() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < in_.size(); ++i)
      if (in_[i]) out.push_back(static_cast<int>(i));
    return out;
  }

private:
  int w_, h_;
  std::vector<char> in_;
};

// Walks from start (a neighbour of from) through degree-2 cells. Returns the
// chain of degree-2 cells and the terminal cell (degree != 2), or -1 when the
// walk closes on itself or exceeds limit cells.
int trace(const Skeleton& sk, int from, int start, std::vector<int>& chain, std::size_t limit) {
  chain.clear();
  int prev = from, cur = start;
  while (true) {
    if (sk.degree(cur) != 2) return cur;
    chain.push_back(cur);
    if (chain.size() > limit) return -1;
    int nb[8];
    const int k = sk.neighbours(cur, nb);
    int next = -1;
    for (int j = 0; j < k; ++j)
      if (nb[j] != prev) next = nb[j];
    if (next < 0 || next == start) return -1;
    prev = cur;
    cur = next;
  }
}

}  // namespace

TopologyGraph2D topology_graph(const VoronoiDiagram2D& vd, int prune_length) {
  if (prune_length < 0) throw Error(ErrorCode::InvalidArgument, "prune length must be non-negative");
  const std::size_t n = static_cast<std::size_t>(vd.width) * static_cast<std::size_t>(vd.height);
  std::vector<char> in(n, 0);
  for (const Waypoint& w : vd.waypoints) in[static_cast<std::size_t>(w.cell)] = 1;
  Skeleton sk(vd.width, vd.height, std::move(in));

  // Iteratively remove spurs: endpoint chains shorter than prune_length that
  // end in a junction.
  std::vector<int> chain;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int p : sk.cells()) {
      if (!sk.has(p) || sk.degree(p) != 1) continue;
      int nb[8];
      sk.neighbours(p, nb);
      int end = trace(sk, p, nb[0], chain, static_cast<std::size_t>(prune_length));
      if (end < 0 || sk.degree(end) < 3) continue;
      if (chain.size() + 1 < static_cast<std::size_t>(prune_length)) {
        sk.remove(p);
        for (int c : chain) sk.remove(c);
        changed = true;
      }
    }
  }

  // Fragments too small to form a spur of their own are noise.
  std::vector<char> seen(n, 0);
  for (int p : sk.cells()) {
    if (seen[static_cast<std::size_t>(p)]) continue;
    std::vector<int> comp{p};
    seen[static_cast<std::size_t>(p)] = 1;
    for (std::size_t k = 0; k < comp.size(); ++k) {
      int nb[8];
      const int m = sk.neighbours(comp[k], nb);
      for (int j = 0; j < m; ++j)
        if (!seen[static_cast<std::size_t>(nb[j])]) {
          seen[static_cast<std::size_t>(nb[j])] = 1;
          comp.push_back(nb[j]);
        }
    }
    if (comp.size() < static_cast<std::size_t>(prune_length))
      for (int c : comp) sk.remove(c);
  }

  TopologyGraph2D tg;
  tg.width = vd.width;
  tg.height = vd.height;
  tg.skeleton = sk.cells();
  tg.diagram.width = vd.width;
  tg.diagram.height = vd.height;
  tg.diagram.waypoint_at.assign(n, -1);
  for (int c : tg.skeleton) {
    tg.diagram.waypoint_at[static_cast<std::size_t>(c)] = static_cast<int>(tg.diagram.waypoints.size());
    tg.diagram.waypoints.push_back(vd.waypoints[static_cast<std::size_t>(vd.waypoint_at[static_cast<std::size_t>(c)])]);
  }

  // Vertices: 8-connected clusters of junction cells, and single end cells.
  std::vector<int> vertex_of(n, -1);
  for (int c : tg.skeleton) {
    if (vertex_of[static_cast<std::size_t>(c)] >= 0) continue;
    const int d = sk.degree(c);
    if (d == 2) continue;
    const int id = static_cast<int>(tg.vertices.size());
    tg.vertices.emplace_back();
    std::deque<int> q{c};
    vertex_of[static_cast<std::size_t>(c)] = id;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      tg.vertices.back().cells.push_back(u);
      if (d < 3) break;
      const int ux = u % vd.width, uy = u / vd.width;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!sk.has(ux + dx, uy + dy)) continue;
          const int w = (uy + dy) * vd.width + ux + dx;
          if (vertex_of[static_cast<std::size_t>(w)] >= 0 || sk.degree(w) < 3) continue;
          vertex_of[static_cast<std::size_t>(w)] = id;
          q.push_back(w);
        }
    }
    std::sort(tg.vertices.back().cells.begin(), tg.vertices.back().cells.end());
  }

  std::vector<char> visited(n, 0);
  auto add_edges_from = [&](int vid) {
    for (int u : tg.vertices[static_cast<std::size_t>(vid)].cells) {
      int nb[8];
      const int k = sk.neighbours(u, nb);
      for (int j = 0; j < k; ++j) {
        const int w = nb[j];
        const int wv = vertex_of[static_cast<std::size_t>(w)];
        if (wv == vid) continue;
        if (wv >= 0) {
          if (vid < wv) tg.edges.push_back(TopoEdge{vid, wv, {}});
          continue;
        }
        if (visited[static_cast<std::size_t>(w)]) continue;
        const int end = trace(sk, u, w, chain, n);
        for (int c : chain) visited[static_cast<std::size_t>(c)] = 1;
        if (end < 0) continue;
        const int ev = vertex_of[static_cast<std::size_t>(end)];
        if (ev == vid && chain.size() < static_cast<std::size_t>(prune_length)) continue;
        tg.edges.push_back(TopoEdge{vid, ev, chain});
      }
    }
  };
  for (std::size_t v = 0; v < tg.vertices.size(); ++v) add_edges_from(static_cast<int>(v));

  // Pure cycles: promote the smallest cell to a vertex.
  for (int c : tg.skeleton) {
    if (visited[static_cast<std::size_t>(c)] || vertex_of[static_cast<std::size_t>(c)] >= 0) continue;
    const int id = static_cast<int>(tg.vertices.size());
    tg.vertices.push_back(TopoVertex{{c}, 0, false});
    vertex_of[static_cast<std::size_t>(c)] = id;
    visited[static_cast<std::size_t>(c)] = 1;
    int nb[8];
    sk.neighbours(c, nb);
    std::vector<int> loop;
    int prev = c, cur = nb[0];
    while (cur != c) {
      loop.push_back(cur);
      visited[static_cast<std::size_t>(cur)] = 1;
      int nn[8];
      const int k = sk.neighbours(cur, nn);
      int next = -1;
      for (int j = 0; j < k; ++j)
        if (nn[j] != prev) next = nn[j];
      if (next < 0) break;
      prev = cur;
      cur = next;
    }
    tg.edges.push_back(TopoEdge{id, id, loop});
  }

  for (const TopoEdge& e : tg.edges) {
    ++tg.vertices[static_cast<std::size_t>(e.v0)].degree;
    ++tg.vertices[static_cast<std::size_t>(e.v1)].degree;
  }
  for (TopoVertex& v : tg.vertices) v.junction = v.degree >= 3;
  return tg;
}

}  // namespace topomap

namespace topomap {

namespace {

struct Cut {
  std::vector<int> cells;
  int away = -1;  // a cell on the side the cut cells join
};

std::vector<int> bresenham(const GridMap2D& map, int a, int b) {
  int x0 = map.x_of(a), y0 = map.y_of(a);
  const int x1 = map.x_of(b), y1 = map.y_of(b);
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  std::vector<int> out;
  while (true) {
    out.push_back(map.index(x0, y0));
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
  return out;
}

Cut make_cut(const GridMap2D& map, const Waypoint& w, int away) {
  Cut cut;
  cut.away = away;
  cut.cells.push_back(w.cell);
  for (int c : bresenham(map, w.site_a, w.site_b))
    if (map.free[static_cast<std::size_t>(c)] && c != w.cell) cut.cells.push_back(c);
  return cut;
}

std::vector<int> components4(const GridMap2D& map, const std::vector<char>& blocked, int& count) {
  std::vector<int> label(map.size(), 0);
  count = 0;
  std::deque<int> q;
  for (std::size_t s = 0; s < map.size(); ++s) {
    if (!map.free[s] || blocked[s] || label[s]) continue;
    label[s] = ++count;
    q.push_back(static_cast<int>(s));
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      const int ux = map.x_of(u), uy = map.y_of(u);
      const int nb[4][2] = {{ux - 1, uy}, {ux + 1, uy}, {ux, uy - 1}, {ux, uy + 1}};
      for (const auto& p : nb) {
        if (!map.is_free(p[0], p[1])) continue;
        const auto w = static_cast<std::size_t>(map.index(p[0], p[1]));
        if (blocked[w] || label[w]) continue;
        label[w] = count;
        q.push_back(static_cast<int>(w));
      }
    }
  }
  return label;
}

// Assigns every free unlabeled cell the smallest label among its labeled
// 4-neighbours, repeating until stable.
// Marches on from `tip` along from->tip for about two clearances and reports
// whether the free space reached is clearly wider than `clearance`.
bool opens_out(const GridMap2D& map, const DistanceField& df, int from, int tip, double clearance, double ratio) {
  const double dx = map.x_of(tip) - map.x_of(from), dy = map.y_of(tip) - map.y_of(from);
  const double norm = std::hypot(dx, dy);
  if (norm == 0.0) return false;
  const int steps = static_cast<int>(std::ceil(2.0 * clearance)) + 1;
  for (int k = 1; k <= steps; ++k) {
    const int x = static_cast<int>(std::lround(map.x_of(tip) + dx / norm * k));
    const int y = static_cast<int>(std::lround(map.y_of(tip) + dy / norm * k));
    if (!map.is_free(x, y)) return false;
    if (ratio * std::sqrt(df.dist2[static_cast<std::size_t>(map.index(x, y))]) >= clearance) return true;
  }
  return false;
}

void fill_unlabeled(const GridMap2D& map, std::vector<int>& label) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (!map.free[i] || label[i]) continue;
      const int x = map.x_of(static_cast<int>(i)), y = map.y_of(static_cast<int>(i));
      int best = 0;
      const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& p : nb) {
        if (!map.in_bounds(p[0], p[1])) continue;
        const int l = label[static_cast<std::size_t>(map.index(p[0], p[1]))];
        if (l > 0 && (best == 0 || l < best)) best = l;
      }
      if (best) {
        label[i] = best;
        changed = true;
      }
    }
  }
}

std::vector<std::set<int>> label_adjacency(const AreaGraph2D& ag) {
  std::vector<std::set<int>> adj(static_cast<std::size_t>(ag.area_count) + 1);
  for (int y = 0; y < ag.height; ++y)
    for (int x = 0; x < ag.width; ++x) {
      const int a = ag.label[static_cast<std::size_t>(y * ag.width + x)];
      if (!a) continue;
      if (x + 1 < ag.width) {
        const int b = ag.label[static_cast<std::size_t>(y * ag.width + x + 1)];
        if (b && b != a) adj[static_cast<std::size_t>(a)].insert(b), adj[static_cast<std::size_t>(b)].insert(a);
      }
      if (y + 1 < ag.height) {
        const int b = ag.label[static_cast<std::size_t>((y + 1) * ag.width + x)];
        if (b && b != a) adj[static_cast<std::size_t>(a)].insert(b), adj[static_cast<std::size_t>(b)].insert(a);
      }
    }
  return adj;
}

}  // namespace

void normalize_areas(AreaGraph2D& ag) {
  std::map<int, int> remap;
  for (int& l : ag.label) {
    if (!l) continue;
    auto it = remap.find(l);
    if (it == remap.end()) it = remap.emplace(l, static_cast<int>(remap.size()) + 1).first;
    l = it->second;
  }
  ag.area_count = static_cast<int>(remap.size());
  std::map<std::pair<int, int>, std::vector<std::array<int, 4>>> segs;
  for (int y = 0; y < ag.height; ++y)
    for (int x = 0; x < ag.width; ++x) {
      const int a = ag.label[static_cast<std::size_t>(y * ag.width + x)];
      if (!a) continue;
      if (x + 1 < ag.width) {
        const int b = ag.label[static_cast<std::size_t>(y * ag.width + x + 1)];
        if (b && b != a) segs[{std::min(a, b), std::max(a, b)}].push_back({x + 1, y, x + 1, y + 1});
      }
      if (y + 1 < ag.height) {
        const int b = ag.label[static_cast<std::size_t>((y + 1) * ag.width + x)];
        if (b && b != a) segs[{std::min(a, b), std::max(a, b)}].push_back({x, y + 1, x + 1, y + 1});
      }
    }
  ag.passages.clear();
  for (auto& [pair, list] : segs) {
    std::sort(list.begin(), list.end());
    ag.passages.push_back(AreaPassage2D{pair.first, pair.second, std::move(list)});
  }
}

AreaGraph2D area_graph(const TopologyGraph2D& tg, const GridMap2D& map, const AreaGraphParams& params) {
  if (tg.width != map.width || tg.height != map.height) throw Error(ErrorCode::DimensionMismatch, "topology graph does not match map");
  const VoronoiDiagram2D& vd = tg.diagram;
  auto wp = [&](int cell) -> const Waypoint& {
    return vd.waypoints[static_cast<std::size_t>(vd.waypoint_at[static_cast<std::size_t>(cell)])];
  };
  constexpr double eps = 1e-9;
  const auto prune = static_cast<std::size_t>(std::max(params.prune_length, 0));
  const DistanceField df = distance_transform(map);
  std::vector<Cut> cuts;

  for (const TopoEdge& e : tg.edges) {
    const std::size_t len = e.chain.size();
    if (len == 0 || e.v0 == e.v1) continue;
    std::vector<double> clr(len);
    for (std::size_t i = 0; i < len; ++i) clr[i] = wp(e.chain[i]).clearance;
    const TopoVertex& v0 = tg.vertices[static_cast<std::size_t>(e.v0)];
    const TopoVertex& v1 = tg.vertices[static_cast<std::size_t>(e.v1)];

    // Gateways next to junctions.
    for (int side = 0; side < 2; ++side) {
      const TopoVertex& here = side == 0 ? v0 : v1;
      const TopoVertex& there = side == 0 ? v1 : v0;
      if (!here.junction) continue;
      // Order from this junction outwards.
      std::vector<double> c = clr;
      std::vector<int> cells = e.chain;
      if (side == 1) {
        std::reverse(c.begin(), c.end());
        std::reverse(cells.begin(), cells.end());
      }
      std::size_t usable = len;
      if (!there.junction && there.degree == 1) {
        // Drop a dead-end tail whose clearance rises monotonically inwards.
        std::size_t k = len - 1;
        while (k > 0 && c[k - 1] > c[k] + eps) --k;
        usable = k + 1;
        if (usable == 1 && len > 1) continue;
      }
      const double m = *std::min_element(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(usable));
      std::size_t i = 0;
      while (i < usable && c[i] > m + eps) ++i;
      if (i >= usable || len - i <= prune) continue;
      const int away = i + 1 < len ? cells[i + 1] : there.cells.front();
      cuts.push_back(make_cut(map, wp(cells[i]), away));
    }

    // A free end that opens into wider space (a corridor mouth whose room
    // carries no skeleton of its own).
    for (int side = 0; side < 2; ++side) {
      const TopoVertex& here = side == 0 ? v0 : v1;
      if (here.junction || here.degree != 1 || len < 2) continue;
      std::vector<double> c = clr;
      std::vector<int> cells = e.chain;
      if (side == 1) {
        std::reverse(c.begin(), c.end());
        std::reverse(cells.begin(), cells.end());
      }
      const double m = *std::min_element(c.begin(), c.end());
      std::size_t i = 0;
      while (i < len && c[i] > m + eps) ++i;
      if (i + 1 >= len) continue;
      bool rising = true;
      for (std::size_t k = 0; k < i && rising; ++k) rising = c[k] + eps >= c[k + 1];
      if (!rising || !opens_out(map, df, cells[std::min<std::size_t>(3, len - 1)], here.cells.front(), m,
                                params.constriction_ratio))
        continue;
      cuts.push_back(make_cut(map, wp(cells[i]), cells[i + 1]));
    }

    // Interior constrictions.
    std::size_t s = 0;
    while (s < len) {
      std::size_t t = s;
      while (t + 1 < len && std::abs(clr[t + 1] - clr[s]) <= eps) ++t;
      if (s > 0 && t + 1 < len && clr[s - 1] > clr[s] + eps && clr[t + 1] > clr[s] + eps) {
        const double left = *std::max_element(clr.begin(), clr.begin() + static_cast<std::ptrdiff_t>(s));
        const double right = *std::max_element(clr.begin() + static_cast<std::ptrdiff_t>(t) + 1, clr.end());
        const double val = clr[s];
        if (val <= params.constriction_ratio * left && val <= params.constriction_ratio * right) {
          if (t - s + 1 <= prune) {
            const std::size_t mid = (s + t) / 2;
            cuts.push_back(make_cut(map, wp(e.chain[mid]), e.chain[mid + 1]));
          } else {
            cuts.push_back(make_cut(map, wp(e.chain[s]), e.chain[s + 1]));
            cuts.push_back(make_cut(map, wp(e.chain[t]), e.chain[t - 1]));
          }
        }
      }
      s = t + 1;
    }
  }

  std::vector<char> blocked(map.size(), 0);
  for (const Cut& c : cuts)
    for (int cell : c.cells) blocked[static_cast<std::size_t>(cell)] = 1;
  AreaGraph2D ag;
  ag.width = map.width;
  ag.height = map.height;
  int count = 0;
  ag.label = components4(map, blocked, count);
  for (const Cut& c : cuts) {
    if (c.away < 0 || blocked[static_cast<std::size_t>(c.away)]) continue;
    const int l = ag.label[static_cast<std::size_t>(c.away)];
    for (int cell : c.cells)
      if (!ag.label[static_cast<std::size_t>(cell)]) ag.label[static_cast<std::size_t>(cell)] = l;
  }
  fill_unlabeled(map, ag.label);
  // Isolated cut-only pockets (no labeled neighbour) become their own areas.
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map.free[i] && !ag.label[i]) {
      ag.label[i] = ++count;
      fill_unlabeled(map, ag.label);
    }
  ag.area_count = count;

  // A junction area bordering three or more areas joins its largest neighbour.
  std::vector<char> has_junction(static_cast<std::size_t>(count) + 1, 0);
  for (const TopoVertex& v : tg.vertices)
    if (v.junction)
      for (int c : v.cells) has_junction[static_cast<std::size_t>(ag.label[static_cast<std::size_t>(c)])] = 1;
  for (int l = 1; l <= count; ++l) {
    if (!has_junction[static_cast<std::size_t>(l)]) continue;
    const auto adj = label_adjacency(ag);
    if (adj[static_cast<std::size_t>(l)].size() < 3) continue;
    std::vector<std::size_t> size(static_cast<std::size_t>(count) + 1, 0);
    for (int v : ag.label) ++size[static_cast<std::size_t>(v)];
    int best = 0;
    for (int nb : adj[static_cast<std::size_t>(l)])
      if (!best || size[static_cast<std::size_t>(nb)] > size[static_cast<std::size_t>(best)]) best = nb;
    for (int& v : ag.label)
      if (v == l) v = best;
  }
  normalize_areas(ag);
  return ag;
}

}  // namespace topomap
