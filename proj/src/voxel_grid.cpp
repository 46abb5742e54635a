#include "topomap/voxel_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "topomap/error.hpp"

namespace topomap {

OccupancyGrid::OccupancyGrid(GridMeta meta, int floor_z_index) : meta_(meta), floor_z_index_(floor_z_index) {
  const std::size_t n = meta_.cell_count() * static_cast<std::size_t>(meta_.nz);
  bits_.assign((n + 63) / 64, 0);
}

bool OccupancyGrid::is_occupied(int ix, int iy, int iz) const {
  if (!meta_.in_bounds(ix, iy) || iz < 0 || iz >= meta_.nz)
    throw Error(ErrorCode::InvalidArgument, "voxel index out of bounds");
  const std::size_t b = bit_index(ix, iy, iz);
  return (bits_[b >> 6] >> (b & 63)) & 1u;
}

void OccupancyGrid::set_occupied(int ix, int iy, int iz) {
  const std::size_t b = bit_index(ix, iy, iz);
  bits_[b >> 6] |= std::uint64_t{1} << (b & 63);
}

std::size_t OccupancyGrid::occupied_count() const {
  std::size_t n = 0;
  for (std::uint64_t w : bits_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

Neighbors4 OccupancyGrid::neighbors4(int ix, int iy) const {
  Neighbors4 out;
  const int cand[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
  for (const auto& c : cand)
    if (meta_.in_bounds(c[0], c[1])) out.cells[static_cast<std::size_t>(out.count++)] = {c[0], c[1]};
  return out;
}

std::array<int, 3> OccupancyGrid::voxel_of(Vec3 p) const {
  auto idx = [&](double v, double o, int n) {
    const int i = static_cast<int>(std::floor((v - o) / meta_.voxel));
    return std::clamp(i, 0, n - 1);
  };
  return {idx(p.x, meta_.origin.x, meta_.nx), idx(p.y, meta_.origin.y, meta_.ny), idx(p.z, meta_.origin.z, meta_.nz)};
}

OccupancyGrid rasterize(const PointCloud& cloud, const StoreySlab& slab, double voxel, std::size_t memory_cap) {
  if (!(voxel > 0.0)) throw Error(ErrorCode::InvalidArgument, "voxel size must be > 0");
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "cannot rasterize an empty cloud");
  const Box3& b = cloud.bounds();
  const double z_lo = std::min(slab.floor_height, b.min.z);
  const double z_hi = std::max(slab.ceiling_height, b.max.z);
  GridMeta meta;
  meta.voxel = voxel;
  meta.origin = {b.min.x - voxel, b.min.y - voxel, z_lo - voxel};
  auto extent = [&](double lo, double hi) { return static_cast<int>(std::floor((hi - lo) / voxel)) + 3; };
  const double nx = std::floor((b.max.x - b.min.x) / voxel) + 3;
  const double ny = std::floor((b.max.y - b.min.y) / voxel) + 3;
  const double nz = std::floor((z_hi - z_lo) / voxel) + 3;
  const double bytes = std::ceil(nx * ny * nz / 64.0) * 8.0;
  if (bytes > static_cast<double>(memory_cap))
    throw Error(ErrorCode::Capacity, "occupancy grid needs " + std::to_string(static_cast<long long>(bytes)) +
                                         " bytes, above the cap of " + std::to_string(memory_cap) + " bytes");
  meta.nx = extent(b.min.x, b.max.x);
  meta.ny = extent(b.min.y, b.max.y);
  meta.nz = extent(z_lo, z_hi);
  const int floor_index = std::clamp(static_cast<int>(std::floor((slab.floor_height - meta.origin.z) / voxel)), 0,
                                     meta.nz - 1);
  OccupancyGrid grid(meta, floor_index);
  for (const Vec3& p : cloud.points()) {
    const auto v = grid.voxel_of(p);
    grid.set_occupied(v[0], v[1], v[2]);
  }
  return grid;
}

void write_occupancy(const OccupancyGrid& grid, const std::filesystem::path& stem) {
  const auto bin_path = std::filesystem::path(stem).concat(".occ");
  const auto json_path = std::filesystem::path(stem).concat(".json");
  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw Error(ErrorCode::Io, "cannot write " + bin_path.string());
  bin.write(reinterpret_cast<const char*>(grid.raw_bits().data()),
            static_cast<std::streamsize>(grid.raw_bits().size() * sizeof(std::uint64_t)));
  const GridMeta& m = grid.meta();
  nlohmann::json j = {{"origin", {m.origin.x, m.origin.y, m.origin.z}},
                      {"voxel", m.voxel},
                      {"dims", {m.nx, m.ny, m.nz}},
                      {"floor_z_index", grid.floor_z_index()},
                      {"layout", "bit (ix*ny+iy)*nz+iz, uint64 words little-endian"}};
  std::ofstream js(json_path);
  if (!js) throw Error(ErrorCode::Io, "cannot write " + json_path.string());
  js << j.dump(2) << '\n';
}

}  // namespace topomap
