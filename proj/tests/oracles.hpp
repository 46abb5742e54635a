#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <span>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "topomap/columns.hpp"
#include "topomap/voxel_grid.hpp"

namespace oracle {

// Random occupancy grid; each cell gets a floor-ish and a ceiling-ish band
// plus scattered clutter, so that bounded runs are common.
inline topomap::OccupancyGrid random_grid(unsigned seed, int n = 32) {
  std::mt19937 rng(seed);
  topomap::GridMeta m;
  m.voxel = 0.1;
  m.nx = m.ny = m.nz = n;
  const int floor = 1 + static_cast<int>(rng() % 3);
  topomap::OccupancyGrid g(m, floor);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double clutter = 0.02 + 0.1 * u(rng);
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy < n; ++iy) {
      if (u(rng) < 0.9) g.set_occupied(ix, iy, floor);
      const int top = n - 4 - static_cast<int>(rng() % 3);
      if (u(rng) < 0.95) g.set_occupied(ix, iy, top);
      for (int iz = 0; iz < n; ++iz)
        if (u(rng) < clutter) g.set_occupied(ix, iy, iz);
    }
  return g;
}

// Columns by scanning each free voxel up and down independently.
inline std::vector<topomap::Column> brute_columns(const topomap::OccupancyGrid& g) {
  const auto& m = g.meta();
  std::vector<topomap::Column> out;
  for (int ix = 0; ix < m.nx; ++ix)
    for (int iy = 0; iy < m.ny; ++iy)
      for (int iz = 0; iz < m.nz; ++iz) {
        if (g.is_occupied(ix, iy, iz)) continue;
        if (iz > 0 && !g.is_occupied(ix, iy, iz - 1)) continue;  // not a run start
        int top = iz;
        while (top + 1 < m.nz && !g.is_occupied(ix, iy, top + 1)) ++top;
        if (top + 1 >= m.nz) continue;          // reaches the top: unbounded
        if (top < g.floor_z_index()) continue;  // entirely below the floor
        out.push_back({ix, iy, std::max(iz, g.floor_z_index()), top});
      }
  return out;
}

inline bool z_overlap(const topomap::Column& a, const topomap::Column& b) { return a.z1 <= b.z2 && b.z1 <= a.z2; }

inline bool cells_adjacent(const topomap::Column& a, const topomap::Column& b) {
  return std::abs(a.ix - b.ix) + std::abs(a.iy - b.iy) == 1;
}

// Connected components of the top-height acceptance rule, over all column pairs.
inline std::vector<int> rule_components(const topomap::ColumnField& f, double rel_tol) {
  const std::size_t n = f.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = f[i];
      const auto& b = f[j];
      if (!cells_adjacent(a, b) || !z_overlap(a, b)) continue;
      if (std::abs(a.z2 - b.z2) <= rel_tol * std::min(a.length(), b.length())) {
        const int ra = find(static_cast<int>(i)), rb = find(static_cast<int>(j));
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = find(static_cast<int>(i));
  return out;
}

// Same partition up to renaming.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it, fresh] = ab.emplace(a[i], b[i]);
    if (!fresh && it->second != b[i]) return false;
    auto [jt, fresh2] = ba.emplace(b[i], a[i]);
    if (!fresh2 && jt->second != a[i]) return false;
  }
  return true;
}

}  // namespace oracle

#include "topomap/passages.hpp"

namespace oracle {

// All-pairs union-find clustering under distance < d; clusters ascending,
// ordered by smallest member.
inline std::vector<std::vector<std::size_t>> brute_clusters(const std::vector<topomap::Vec3>& pts, double d) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y, dz = pts[i].z - pts[j].z;
      if (std::sqrt(dx * dx + dy * dy + dz * dz) < d) parent[find(i)] = find(j);
    }
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [r, g] : by_root) out.push_back(g);
  std::sort(out.begin(), out.end());
  return out;
}

// Volume owning layer iz at cell (ix, iy), or -1.
inline int volume_at(const topomap::ColumnField& f, std::span<const int> volume_of, int ix, int iy, int iz) {
  if (!f.meta().in_bounds(ix, iy)) return -1;
  const std::size_t first = f.first_index(ix, iy);
  const auto cols = f.at(ix, iy);
  for (std::size_t k = 0; k < cols.size(); ++k)
    if (cols[k].z1 <= iz && iz <= cols[k].z2) return volume_of[first + k];
  return -1;
}

// Number of faces of passage p that do not separate a voxel of p.a from a voxel of p.b.
inline std::size_t separation_violations(const topomap::ColumnField& f, std::span<const int> volume_of,
                                         const topomap::Passage& p) {
  std::size_t bad = p.faces.empty() ? 1 : 0;
  for (const topomap::Face& face : p.faces) {
    const auto ca = face.cell_a(), cb = face.cell_b();
    const int va = volume_at(f, volume_of, ca[0], ca[1], face.iz);
    const int vb = volume_at(f, volume_of, cb[0], cb[1], face.iz);
    if (!((va == p.a && vb == p.b) || (va == p.b && vb == p.a))) ++bad;
  }
  return bad;
}

}  // namespace oracle

#include "topomap/geometry.hpp"

namespace oracle {

// All pairs, both circles, strict interior.
inline std::vector<std::pair<int, int>> brute_alpha(const std::vector<topomap::Vec2>& p, double alpha) {
  std::vector<std::pair<int, int>> out;
  const double r = 0.5 * alpha, eps = 1e-9 * std::max(1.0, alpha);
  for (int i = 0; i < static_cast<int>(p.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(p.size()); ++j) {
      const double dx = p[j].x - p[i].x, dy = p[j].y - p[i].y, d = std::hypot(dx, dy);
      if (d == 0.0 || d > alpha) continue;
      const double mx = 0.5 * (p[i].x + p[j].x), my = 0.5 * (p[i].y + p[j].y);
      const double h = std::sqrt(std::max(0.0, r * r - 0.25 * d * d));
      bool any_empty = false;
      for (int s : {-1, 1}) {
        const double cx = mx - s * h * dy / d, cy = my + s * h * dx / d;
        bool empty = true;
        for (int k = 0; k < static_cast<int>(p.size()) && empty; ++k)
          if (k != i && k != j && std::hypot(p[k].x - cx, p[k].y - cy) < r - eps) empty = false;
        any_empty = any_empty || empty;
      }
      if (any_empty) out.emplace_back(i, j);
    }
  return out;
}

}  // namespace oracle
