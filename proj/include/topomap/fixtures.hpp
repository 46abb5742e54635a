#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topomap/cloud_io.hpp"
#include "topomap/evaluation.hpp"
#include "topomap/voxel_grid.hpp"

namespace topomap {

enum class FixtureKind { two_rooms_door, slanted_ceiling, two_storey, corridor_T, table_room, glass_front };
std::string to_string(FixtureKind k);
std::optional<FixtureKind> parse_fixture_kind(const std::string& s);

struct FixtureParams {
  double density = 400.0;  // points per square metre of surface
  std::uint32_t seed = 7;
  double height = 3.0;
  // two_rooms_door / table_room
  double room_size = 4.0;
  double door_width = 0.9;
  double door_height = 2.0;
  // slanted_ceiling
  double slope = 0.05;
  double step = 0.0;  // ceiling drop of the sloped half, as a fraction of height
  // two_storey
  double slab = 0.3;
  // glass_front
  int rooms_per_side = 3;
  double room_width = 4.0;
  double room_depth = 4.0;
  double corridor_width = 2.0;
  double front_opening = 1.5;  // full-height gap in each glass front
};

struct Box2 {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  friend bool operator==(const Box2&, const Box2&) = default;
};

struct LabelBox {
  Box2 box;
  std::uint32_t label = 0;
  friend bool operator==(const LabelBox&, const LabelBox&) = default;
};

struct FixtureTruth {
  std::string kind;
  int storeys = 1;
  std::vector<double> peak_heights;  // floor/ceiling surfaces, ascending
  int regions = 0;                   // region1 count of storey 0
  int region_edges = 0;
  std::vector<std::string> region_kinds;  // sorted
  int volumes = -1;                       // -1 when not fixed by construction
  int leaf_regions = -1;                  // expected leaf areas of storey 0, -1 when not asserted
  // Storey-0 footprint: a cell is free when its square lies inside one free
  // box. Openings are zero-width boxes in a wall plane; they are widened by
  // one voxel to each side when rendered.
  std::vector<Box2> free_boxes;
  std::vector<Box2> openings;
  // First box containing a free cell's centre gives its label.
  std::vector<LabelBox> labels;
};

struct Fixture {
  PointCloud cloud;
  FixtureTruth truth;
};

Fixture make_fixture(FixtureKind kind, const FixtureParams& params = {});

// The (origin, voxel, nx, ny) that rasterize() uses for a cloud's x/y bounds.
GridMeta planar_grid_for(const PointCloud& cloud, double voxel);

// Ground-truth label raster on an (nx, ny) storey grid.
LabelImage render_truth(const FixtureTruth& truth, const GridMeta& grid);

std::string truth_json(const FixtureTruth& truth);

}  // namespace topomap
