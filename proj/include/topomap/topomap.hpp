#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "topomap/evaluation.hpp"
#include "topomap/storey_segmentation.hpp"
#include "topomap/subdivide.hpp"

namespace topomap {

enum class NodeLevel { storey, region1, region2, volume };
std::string to_string(NodeLevel l);
NodeLevel parse_node_level(const std::string& s);

struct MapNode {
  int id = 0;
  NodeLevel level = NodeLevel::storey;
  std::string kind;  // storey, room, connection, subregion, volume
  int parent = -1;
  int storey = 0;
  std::vector<int> children;
  Vec3 centroid;
  double size_m3 = 0.0;
  std::vector<std::uint32_t> columns;  // volume nodes: indices into the storey's column field

  friend bool operator==(const MapNode&, const MapNode&) = default;
};

struct MapEdge {
  int a = 0;  // node ids, a < b
  int b = 0;
  NodeLevel level = NodeLevel::volume;
  int storey = 0;
  std::vector<Face> faces;
  std::vector<LatticePoint> points;

  friend bool operator==(const MapEdge&, const MapEdge&) = default;
};

struct StoreyInfo {
  StoreySlab slab;
  ColumnField field;
  int node = 0;

  friend bool operator==(const StoreyInfo&, const StoreyInfo&) = default;
};

inline constexpr int kFormatVersion = 1;

struct TopoMap {
  int format_version = kFormatVersion;
  std::vector<StoreyInfo> storeys;
  std::vector<MapNode> nodes;  // index == id
  std::vector<MapEdge> edges;

  // Column indices (ascending) owned by the node and its descendants.
  std::vector<std::uint32_t> node_columns(int id) const;
  // Leaf region node (region2 if present, else region1) per volume node id;
  // -1 for non-volume ids.
  std::vector<int> leaf_regions() const;

  friend bool operator==(const TopoMap&, const TopoMap&) = default;
};

struct StoreyBuild {
  StoreySlab slab;
  ColumnField field;
  StoreyHierarchy hierarchy;
};

// Builds the node tree storey -> region1 -> [region2 ->] volume with ids
// assigned level by level, and validates the result.
TopoMap assemble(std::span<const StoreyBuild> storeys);

// Throws Internal on any broken structural invariant.
void validate(const TopoMap& map);

// Voxel centre of an owned column nearest to the columns' mean voxel centre.
Vec3 snapped_centroid(const ColumnField& field, std::span<const std::uint32_t> columns);

// Leaf-region raster of a storey over its (nx, ny) grid; labels are 1-based
// in order of leaf node id.
LabelImage leaf_label_image(const TopoMap& map, int storey);
LabelImage region1_label_image(const TopoMap& map, int storey);

enum class ExportDim { d0, d1, d2, d3 };
std::string to_string(ExportDim d);
ExportDim parse_export_dim(const std::string& s);

// Writes map_<dim>.json plus the dimension's side files into out_dir and
// returns the written paths.
std::vector<std::filesystem::path> export_map(const TopoMap& map, ExportDim dim, const std::filesystem::path& out_dir);

// Reads a d3 export back.
TopoMap import_map(const std::filesystem::path& json_path);

// Cell-boundary loops of a set of (ix, iy) cells, in lattice corner units.
std::vector<std::vector<std::array<int, 2>>> boundary_loops(std::span<const std::array<int, 2>> cells);

}  // namespace topomap
