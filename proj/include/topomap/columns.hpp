#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "topomap/voxel_grid.hpp"

namespace topomap {

// A vertical run of free voxels [z1, z2] at horizontal cell (ix, iy).
struct Column {
  int ix = 0;
  int iy = 0;
  int z1 = 0;
  int z2 = 0;

  int length() const { return z2 - z1 + 1; }
  friend bool operator==(const Column&, const Column&) = default;
  friend auto operator<=>(const Column&, const Column&) = default;
};

// Columns in (ix, iy, z1) lexicographic order with a per-cell offset table.
class ColumnField {
public:
  ColumnField() = default;
  ColumnField(GridMeta meta, std::vector<Column> columns);

  const GridMeta& meta() const { return meta_; }
  std::span<const Column> columns() const { return columns_; }
  const Column& operator[](std::size_t i) const { return columns_[i]; }
  std::size_t size() const { return columns_.size(); }

  std::span<const Column> at(int ix, int iy) const;
  // Index of the first column stored at (ix, iy).
  std::size_t first_index(int ix, int iy) const;

  // Metric extent: z_1 is the bottom boundary of layer z1, z_2 the top of z2.
  double bottom_m(const Column& c) const { return meta_.z_at(c.z1); }
  double top_m(const Column& c) const { return meta_.z_at(c.z2 + 1); }
  Vec3 center_m(const Column& c) const {
    return {meta_.x_at(c.ix + 0.5), meta_.y_at(c.iy + 0.5), meta_.z_at(0.5 * (c.z1 + c.z2 + 1))};
  }

  // Calls fn(j) for every column j at a 4-neighbouring cell whose layer range
  // overlaps column i's.
  template <typename Fn>
  void for_each_adjacent(std::size_t i, Fn&& fn) const;

  friend bool operator==(const ColumnField& a, const ColumnField& b) {
    return a.meta_ == b.meta_ && a.columns_ == b.columns_;
  }

private:
  GridMeta meta_;
  std::vector<Column> columns_;
  std::vector<std::size_t> offsets_;  // cell_count + 1 entries
};

template <typename Fn>
void ColumnField::for_each_adjacent(std::size_t i, Fn&& fn) const {
  const Column& c = columns_[i];
  const int cand[4][2] = {{c.ix - 1, c.iy}, {c.ix + 1, c.iy}, {c.ix, c.iy - 1}, {c.ix, c.iy + 1}};
  for (const auto& n : cand) {
    if (!meta_.in_bounds(n[0], n[1])) continue;
    const std::size_t cell = meta_.cell_index(n[0], n[1]);
    for (std::size_t j = offsets_[cell]; j < offsets_[cell + 1]; ++j) {
      const Column& o = columns_[j];
      if (o.z1 > c.z2) break;
      if (o.z2 >= c.z1) fn(j);
    }
  }
}

struct ColumnStats {
  std::size_t raw_runs = 0;
  std::size_t pruned_unbounded = 0;
  std::size_t clamped_to_floor = 0;
  std::size_t below_floor_deleted = 0;
};

// Every maximal vertical run of free voxels, no filtering.
ColumnField find_free_runs(const OccupancyGrid& grid);

// Drops runs that are not capped by an occupied voxel (they reach the top).
ColumnField prune_unbounded(const ColumnField& field, const OccupancyGrid& grid, ColumnStats* stats = nullptr);

// Runs extending below the floor layer start at the floor; runs entirely
// below it are deleted.
ColumnField clamp_to_floor(const ColumnField& field, const OccupancyGrid& grid, ColumnStats* stats = nullptr);

ColumnField extract_columns(const OccupancyGrid& grid, ColumnStats* stats = nullptr);

}  // namespace topomap
