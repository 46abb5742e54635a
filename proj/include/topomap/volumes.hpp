#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "topomap/columns.hpp"

namespace topomap {

struct Volume {
  int id = 0;
  std::vector<std::uint32_t> columns;  // indices into the ColumnField, ascending
  double size_m3 = 0.0;
  double bottom_m = 0.0;  // lowest column bottom
  double top_m = 0.0;     // highest column top

  friend bool operator==(const Volume&, const Volume&) = default;
};

struct VolumeSet {
  std::vector<Volume> volumes;
  std::vector<int> volume_of;  // per column index
};

// Sum over columns of length * voxel^3.
double volume_size(const Volume& v, const ColumnField& field);

// Fills size/extent fields of v from its column list.
void finalize_volume(Volume& v, const ColumnField& field);

// Seeded flood fill over 4-adjacent columns with overlapping layers; a
// neighbour n joins from accepted column c when
// |z2(c) - z2(n)| <= rel_tol * min(len(c), len(n)).
VolumeSet grow_volumes(const ColumnField& field, double rel_tol);

// Rebuilds a VolumeSet from a per-column assignment, numbering volumes by their
// first column.
VolumeSet volumes_from_assignment(const ColumnField& field, const std::vector<int>& group_of);

}  // namespace topomap
