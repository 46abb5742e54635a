#include "topomap/columns.hpp"

#include <algorithm>

#include "topomap/error.hpp"

namespace topomap {

ColumnField::ColumnField(GridMeta meta, std::vector<Column> columns) : meta_(meta), columns_(std::move(columns)) {
  std::sort(columns_.begin(), columns_.end());
  offsets_.assign(meta_.cell_count() + 1, 0);
  for (const Column& c : columns_) {
    if (!meta_.in_bounds(c.ix, c.iy) || c.z1 > c.z2)
      throw Error(ErrorCode::Internal, "column outside its grid or with z1 > z2");
    ++offsets_[meta_.cell_index(c.ix, c.iy) + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
}

std::span<const Column> ColumnField::at(int ix, int iy) const {
  if (!meta_.in_bounds(ix, iy)) return {};
  const std::size_t cell = meta_.cell_index(ix, iy);
  return std::span<const Column>(columns_).subspan(offsets_[cell], offsets_[cell + 1] - offsets_[cell]);
}

std::size_t ColumnField::first_index(int ix, int iy) const { return offsets_[meta_.cell_index(ix, iy)]; }

ColumnField find_free_runs(const OccupancyGrid& grid) {
  const GridMeta& m = grid.meta();
  std::vector<Column> runs;
  for (int ix = 0; ix < m.nx; ++ix)
    for (int iy = 0; iy < m.ny; ++iy) {
      int iz = 0;
      while (iz < m.nz) {
        if (grid.is_occupied(ix, iy, iz)) {
          ++iz;
          continue;
        }
        const int start = iz;
        while (iz < m.nz && !grid.is_occupied(ix, iy, iz)) ++iz;
        runs.push_back({ix, iy, start, iz - 1});
      }
    }
  return ColumnField(m, std::move(runs));
}

ColumnField prune_unbounded(const ColumnField& field, const OccupancyGrid& grid, ColumnStats* stats) {
  std::vector<Column> kept;
  kept.reserve(field.size());
  for (const Column& c : field.columns()) {
    if (c.z2 + 1 < grid.meta().nz && grid.is_occupied(c.ix, c.iy, c.z2 + 1)) kept.push_back(c);
    else if (stats) ++stats->pruned_unbounded;
  }
  return ColumnField(field.meta(), std::move(kept));
}

ColumnField clamp_to_floor(const ColumnField& field, const OccupancyGrid& grid, ColumnStats* stats) {
  const int floor = grid.floor_z_index();
  std::vector<Column> kept;
  kept.reserve(field.size());
  for (Column c : field.columns()) {
    if (c.z2 < floor) {
      if (stats) ++stats->below_floor_deleted;
      continue;
    }
    if (c.z1 < floor) {
      c.z1 = floor;
      if (stats) ++stats->clamped_to_floor;
    }
    kept.push_back(c);
  }
  return ColumnField(field.meta(), std::move(kept));
}

ColumnField extract_columns(const OccupancyGrid& grid, ColumnStats* stats) {
  ColumnField runs = find_free_runs(grid);
  if (stats) stats->raw_runs = runs.size();
  return clamp_to_floor(prune_unbounded(runs, grid, stats), grid, stats);
}

}  // namespace topomap
