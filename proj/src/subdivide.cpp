#include "topomap/subdivide.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "topomap/disjoint_set.hpp"
#include "topomap/error.hpp"

namespace topomap {

namespace {

// Label of the nearest labeled cell by breadth-first search over the map.
int nearest_label(const GridMap2D& map, const std::vector<int>& label, int x, int y) {
  std::vector<char> seen(map.size(), 0);
  std::deque<int> q{map.index(x, y)};
  seen[static_cast<std::size_t>(q.front())] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    if (label[static_cast<std::size_t>(u)] > 0) return label[static_cast<std::size_t>(u)];
    const int ux = map.x_of(u), uy = map.y_of(u);
    const int nb[4][2] = {{ux - 1, uy}, {ux + 1, uy}, {ux, uy - 1}, {ux, uy + 1}};
    for (const auto& p : nb) {
      if (!map.in_bounds(p[0], p[1])) continue;
      const int w = map.index(p[0], p[1]);
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = 1;
      q.push_back(w);
    }
  }
  return 0;
}

}  // namespace

RegionSplit subdivide_region(const ColumnField& field, const VolumeSet& volumes, const Region& region,
                             const GridMap2D& map, const std::vector<int>& label) {
  if (label.size() != map.size()) throw Error(ErrorCode::DimensionMismatch, "label image does not match map");
  RegionSplit out;
  std::vector<std::uint32_t> cols;
  for (int v : region.volumes) {
    const auto& vc = volumes.volumes[static_cast<std::size_t>(v)].columns;
    cols.insert(cols.end(), vc.begin(), vc.end());
  }
  std::sort(cols.begin(), cols.end());
  std::vector<int> local(field.size(), -1);
  for (std::size_t i = 0; i < cols.size(); ++i) local[cols[i]] = static_cast<int>(i);

  std::vector<int> col_label(cols.size(), 0);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const Column& c = field[cols[i]];
    const int x = c.ix - map.offset_x, y = c.iy - map.offset_y;
    if (!map.in_bounds(x, y)) throw Error(ErrorCode::DimensionMismatch, "column outside the label image");
    int l = label[static_cast<std::size_t>(map.index(x, y))];
    if (l <= 0) {
      l = nearest_label(map, label, x, y);
      ++out.unlabeled_columns;
    }
    col_label[i] = l;
  }

  DisjointSet ds(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    field.for_each_adjacent(cols[i], [&](std::size_t j) {
      const int lj = local[j];
      if (lj < 0 || col_label[static_cast<std::size_t>(lj)] != col_label[i]) return;
      if (volumes.volume_of[j] != volumes.volume_of[cols[i]]) return;
      ds.unite(i, static_cast<std::size_t>(lj));
    });
  }
  for (const auto& g : groups(ds)) {
    std::vector<std::uint32_t> piece;
    for (std::size_t i : g) piece.push_back(cols[i]);
    out.labels.push_back(col_label[g.front()]);
    out.pieces.push_back(std::move(piece));
  }
  return out;
}

StoreyHierarchy subdivide_regions(const ColumnField& field, const VolumeSet& volumes, const RegionGraph& rg,
                                  const SubdivisionParams& params) {
  StoreyHierarchy h;
  std::vector<int> piece_of(field.size(), -1);
  struct PieceInfo {
    int region;
    int label;
    std::uint32_t first_column;
  };
  std::vector<PieceInfo> pieces;

  for (std::size_t r = 0; r < rg.regions.size(); ++r) {
    const Region& region = rg.regions[r];
    double size = 0.0;
    for (int v : region.volumes) size += volumes.volumes[static_cast<std::size_t>(v)].size_m3;
    if (size > params.gate_m3) {
      std::vector<std::uint32_t> cols;
      for (int v : region.volumes) {
        const auto& vc = volumes.volumes[static_cast<std::size_t>(v)].columns;
        cols.insert(cols.end(), vc.begin(), vc.end());
      }
      GridMap2D map = project_region(field, cols);
      AreaGraph2D ag = segment_map(map, params.segment);
      for (const auto& w : ag.warnings) h.warnings.push_back("region " + std::to_string(r) + ": " + w);
      const RegionSplit split = subdivide_region(field, volumes, region, map, ag.label);
      h.unlabeled_columns += split.unlabeled_columns;
      for (std::size_t p = 0; p < split.pieces.size(); ++p) {
        for (std::uint32_t c : split.pieces[p]) piece_of[c] = static_cast<int>(pieces.size());
        pieces.push_back(PieceInfo{static_cast<int>(r), split.labels[p], split.pieces[p].front()});
      }
      h.subdivided.push_back(static_cast<int>(r));
      h.maps.push_back(std::move(map));
      h.area_graphs.push_back(std::move(ag));
    } else {
      for (int v : region.volumes) {
        const auto& vc = volumes.volumes[static_cast<std::size_t>(v)].columns;
        for (std::uint32_t c : vc) piece_of[c] = static_cast<int>(pieces.size());
        pieces.push_back(PieceInfo{static_cast<int>(r), 0, vc.front()});
      }
    }
  }
  if (h.unlabeled_columns > 0)
    h.warnings.push_back(std::to_string(h.unlabeled_columns) + " columns had no area label and took the nearest one");

  h.volumes = volumes_from_assignment(field, piece_of);
  h.regions1 = rg.regions;
  for (Region& r : h.regions1) r.volumes.clear();
  std::vector<int> region1_of(h.volumes.volumes.size(), -1);
  std::vector<int> label_of(h.volumes.volumes.size(), 0);
  for (const PieceInfo& p : pieces) {
    const int v = h.volumes.volume_of[p.first_column];
    region1_of[static_cast<std::size_t>(v)] = p.region;
    label_of[static_cast<std::size_t>(v)] = p.label;
    h.regions1[static_cast<std::size_t>(p.region)].volumes.push_back(v);
  }
  for (Region& r : h.regions1) std::sort(r.volumes.begin(), r.volumes.end());

  h.leaf_of.assign(h.volumes.volumes.size(), -1);
  for (std::size_t r = 0; r < h.regions1.size(); ++r) {
    const bool divided = std::binary_search(h.subdivided.begin(), h.subdivided.end(), static_cast<int>(r));
    if (!divided) {
      const int leaf = static_cast<int>(h.leaves.size());
      h.leaves.emplace_back(1, static_cast<int>(r));
      for (int v : h.regions1[r].volumes) h.leaf_of[static_cast<std::size_t>(v)] = leaf;
      continue;
    }
    std::map<int, std::vector<int>> by_label;
    for (int v : h.regions1[r].volumes) by_label[label_of[static_cast<std::size_t>(v)]].push_back(v);
    for (auto& [label, vols] : by_label) {
      const int leaf = static_cast<int>(h.leaves.size());
      h.leaves.emplace_back(2, static_cast<int>(h.regions2.size()));
      for (int v : vols) h.leaf_of[static_cast<std::size_t>(v)] = leaf;
      h.regions2.push_back(SubRegion{static_cast<int>(r), label, std::move(vols)});
    }
  }

  const double d_lat = params.d_th / field.meta().voxel;
  h.volume_graph = generate_passages(field, h.volumes.volume_of, h.volumes.volumes.size(), params.d_th);
  h.region1_edges = lift_passages(h.volume_graph, region1_of, d_lat);
  h.leaf_edges = lift_passages(h.volume_graph, h.leaf_of, d_lat);
  return h;
}

}  // namespace topomap
