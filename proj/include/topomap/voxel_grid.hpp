#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "topomap/cloud_io.hpp"
#include "topomap/geometry.hpp"
#include "topomap/storey_segmentation.hpp"

namespace topomap {

struct GridMeta {
  Vec3 origin;  // min corner
  double voxel = 0.0;
  int nx = 0, ny = 0, nz = 0;

  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t cell_index(int ix, int iy) const {
    return static_cast<std::size_t>(ix) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(iy);
  }
  bool in_bounds(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < nx && iy < ny; }

  // Voxel layer boundaries and centres in metres.
  double x_at(double ix) const { return origin.x + ix * voxel; }
  double y_at(double iy) const { return origin.y + iy * voxel; }
  double z_at(double iz) const { return origin.z + iz * voxel; }
  Vec3 lattice_to_metric(const LatticePoint& p) const { return {x_at(p.x), y_at(p.y), z_at(p.z)}; }

  friend bool operator==(const GridMeta&, const GridMeta&) = default;
};

// Up to four in-bounds horizontal neighbours in the order -x, +x, -y, +y.
struct Neighbors4 {
  std::array<std::array<int, 2>, 4> cells{};
  int count = 0;

  const std::array<int, 2>* begin() const { return cells.data(); }
  const std::array<int, 2>* end() const { return cells.data() + count; }
};

class OccupancyGrid {
public:
  OccupancyGrid() = default;
  OccupancyGrid(GridMeta meta, int floor_z_index);

  const GridMeta& meta() const { return meta_; }
  int floor_z_index() const { return floor_z_index_; }

  bool is_occupied(int ix, int iy, int iz) const;
  void set_occupied(int ix, int iy, int iz);
  std::size_t occupied_count() const;

  Neighbors4 neighbors4(int ix, int iy) const;

  // Voxel index of a metric point; the point must lie in the grid.
  std::array<int, 3> voxel_of(Vec3 p) const;

  std::size_t memory_bytes() const { return bits_.size() * sizeof(std::uint64_t); }
  const std::vector<std::uint64_t>& raw_bits() const { return bits_; }

private:
  std::size_t bit_index(int ix, int iy, int iz) const {
    return meta_.cell_index(ix, iy) * static_cast<std::size_t>(meta_.nz) + static_cast<std::size_t>(iz);
  }

  GridMeta meta_;
  int floor_z_index_ = 0;
  std::vector<std::uint64_t> bits_;
};

inline constexpr std::size_t kDefaultMemoryCap = std::size_t{2} << 30;

// Grid covering the cloud's x/y bounds and the slab's z extent (widened to the
// cloud's z range) with one voxel of padding on every side.
OccupancyGrid rasterize(const PointCloud& cloud, const StoreySlab& slab, double voxel,
                        std::size_t memory_cap = kDefaultMemoryCap);

// Debug dump: flat little-endian bit words plus a JSON sidecar.
void write_occupancy(const OccupancyGrid& grid, const std::filesystem::path& stem);

}  // namespace topomap
