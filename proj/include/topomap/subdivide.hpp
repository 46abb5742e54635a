#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "topomap/areagraph2d.hpp"
#include "topomap/regions.hpp"

namespace topomap {

struct SubdivisionParams {
  double gate_m3 = 20.0;  // only regions strictly larger are subdivided
  double d_th = 0.225;    // metres
  SegmentParams segment;
};

// Columns of one region split by area label.
struct RegionSplit {
  std::vector<int> labels;                         // area label of each piece
  std::vector<std::vector<std::uint32_t>> pieces;  // column indices, ascending
  std::size_t unlabeled_columns = 0;               // resolved to the nearest labeled cell
};

// Splits every volume of the region by the area label under each column, and
// each part further into 4-connected pieces.
RegionSplit subdivide_region(const ColumnField& field, const VolumeSet& volumes, const Region& region,
                             const GridMap2D& map, const std::vector<int>& label);

struct SubRegion {
  int parent = 0;  // region1 index
  int label = 0;   // area label inside the parent
  std::vector<int> volumes;

  friend bool operator==(const SubRegion&, const SubRegion&) = default;
};

// Storey hierarchy after subdivision. Volume ids refer to the final volume set.
struct StoreyHierarchy {
  VolumeSet volumes;
  VolumeGraph volume_graph;
  std::vector<Region> regions1;
  std::vector<Passage> region1_edges;
  std::vector<SubRegion> regions2;
  // Leaves in region1 order: the region2 children of a subdivided region,
  // otherwise the region1 itself. Entries are (level 1 or 2, index).
  std::vector<std::pair<int, int>> leaves;
  std::vector<int> leaf_of;         // per final volume
  std::vector<Passage> leaf_edges;  // endpoints are leaf ids
  std::vector<GridMap2D> maps;              // per subdivided region
  std::vector<AreaGraph2D> area_graphs;     // per subdivided region
  std::vector<int> subdivided;              // region1 indices, ascending
  std::vector<std::string> warnings;
  std::size_t unlabeled_columns = 0;
};

StoreyHierarchy subdivide_regions(const ColumnField& field, const VolumeSet& volumes, const RegionGraph& rg,
                                  const SubdivisionParams& params);

}  // namespace topomap
