#include "topomap/volumes.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>

#include "topomap/error.hpp"

namespace topomap {

double volume_size(const Volume& v, const ColumnField& field) {
  const double voxel3 = field.meta().voxel * field.meta().voxel * field.meta().voxel;
  long long voxels = 0;
  for (std::uint32_t c : v.columns) voxels += field[c].length();
  return static_cast<double>(voxels) * voxel3;
}

void finalize_volume(Volume& v, const ColumnField& field) {
  std::sort(v.columns.begin(), v.columns.end());
  v.size_m3 = volume_size(v, field);
  v.bottom_m = std::numeric_limits<double>::infinity();
  v.top_m = -std::numeric_limits<double>::infinity();
  for (std::uint32_t c : v.columns) {
    v.bottom_m = std::min(v.bottom_m, field.bottom_m(field[c]));
    v.top_m = std::max(v.top_m, field.top_m(field[c]));
  }
}

VolumeSet grow_volumes(const ColumnField& field, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must be in (0, 1)");
  VolumeSet out;
  out.volume_of.assign(field.size(), -1);
  std::deque<std::size_t> frontier;
  // Columns are stored in (ix, iy, z1) order, so scanning indices visits seeds
  // lexicographically.
  for (std::size_t seed = 0; seed < field.size(); ++seed) {
    if (out.volume_of[seed] >= 0) continue;
    Volume v;
    v.id = static_cast<int>(out.volumes.size());
    out.volume_of[seed] = v.id;
    frontier.push_back(seed);
    while (!frontier.empty()) {
      const std::size_t c = frontier.front();
      frontier.pop_front();
      v.columns.push_back(static_cast<std::uint32_t>(c));
      const Column& cc = field[c];
      field.for_each_adjacent(c, [&](std::size_t n) {
        if (out.volume_of[n] >= 0) return;
        const Column& nn = field[n];
        const double limit = rel_tol * std::min(cc.length(), nn.length());
        if (std::abs(cc.z2 - nn.z2) <= limit) {
          out.volume_of[n] = v.id;
          frontier.push_back(n);
        }
      });
    }
    finalize_volume(v, field);
    out.volumes.push_back(std::move(v));
  }
  return out;
}

VolumeSet volumes_from_assignment(const ColumnField& field, const std::vector<int>& group_of) {
  if (group_of.size() != field.size()) throw Error(ErrorCode::Internal, "assignment size mismatch");
  VolumeSet out;
  out.volume_of.assign(field.size(), -1);
  std::vector<int> remap;
  for (std::size_t c = 0; c < field.size(); ++c) {
    const int g = group_of[c];
    if (g < 0) throw Error(ErrorCode::Internal, "column without volume");
    if (static_cast<std::size_t>(g) >= remap.size()) remap.resize(static_cast<std::size_t>(g) + 1, -1);
    if (remap[static_cast<std::size_t>(g)] < 0) {
      remap[static_cast<std::size_t>(g)] = static_cast<int>(out.volumes.size());
      out.volumes.push_back(Volume{remap[static_cast<std::size_t>(g)], {}, 0, 0, 0});
    }
    const int id = remap[static_cast<std::size_t>(g)];
    out.volume_of[c] = id;
    out.volumes[static_cast<std::size_t>(id)].columns.push_back(static_cast<std::uint32_t>(c));
  }
  for (Volume& v : out.volumes) finalize_volume(v, field);
  return out;
}

}  // namespace topomap
