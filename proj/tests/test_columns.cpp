#include <doctest.h>

#include "oracles.hpp"
#include "topomap/columns.hpp"

using namespace topomap;

namespace {

OccupancyGrid stack_grid(const std::vector<int>& occupied_layers, int nz, int floor) {
  GridMeta m;
  m.voxel = 0.1;
  m.nx = m.ny = 3;
  m.nz = nz;
  OccupancyGrid g(m, floor);
  for (int z : occupied_layers) g.set_occupied(1, 1, z);
  return g;
}

std::vector<Column> at_centre(const ColumnField& f) {
  auto s = f.at(1, 1);
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("single and double runs") {
  const ColumnField one = extract_columns(stack_grid({0, 4}, 5, 0));
  CHECK(at_centre(one) == std::vector<Column>{{1, 1, 1, 3}});
  const ColumnField two = extract_columns(stack_grid({0, 2, 4}, 5, 0));
  CHECK(at_centre(two) == std::vector<Column>{{1, 1, 1, 1}, {1, 1, 3, 3}});
}

TEST_CASE("unbounded columns are pruned and counted") {
  ColumnStats stats;
  const ColumnField f = extract_columns(stack_grid({0, 4}, 7, 0), &stats);
  // The centre run above layer 4 reaches the top; all 8 other cells are open.
  CHECK(at_centre(f) == std::vector<Column>{{1, 1, 1, 3}});
  CHECK(f.size() == 1);
  CHECK(stats.pruned_unbounded == 9);
}

TEST_CASE("floor holes clamp to the floor; runs below the floor vanish") {
  const ColumnField hole = extract_columns(stack_grid({9}, 10, 3));
  CHECK(at_centre(hole) == std::vector<Column>{{1, 1, 3, 8}});
  const ColumnField resting = extract_columns(stack_grid({3, 9}, 10, 3));
  CHECK(at_centre(resting) == std::vector<Column>{{1, 1, 4, 8}});
  ColumnStats stats;
  const ColumnField below = extract_columns(stack_grid({1, 3, 9}, 10, 3), &stats);
  CHECK(at_centre(below) == std::vector<Column>{{1, 1, 4, 8}});
  CHECK(stats.below_floor_deleted == 2);
}

TEST_CASE("extract_columns equals the brute-force scan on random grids") {
  for (unsigned seed = 0; seed < 50; ++seed) {
    const OccupancyGrid g = oracle::random_grid(seed);
    const ColumnField f = extract_columns(g);
    CAPTURE(seed);
    CHECK(std::vector<Column>(f.columns().begin(), f.columns().end()) == oracle::brute_columns(g));
  }
}

TEST_CASE("adjacency visits 4-neighbour columns with overlapping layers") {
  const OccupancyGrid g = oracle::random_grid(77, 12);
  const ColumnField f = extract_columns(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::vector<std::size_t> got, want;
    f.for_each_adjacent(i, [&](std::size_t j) { got.push_back(j); });
    for (std::size_t j = 0; j < f.size(); ++j)
      if (oracle::cells_adjacent(f[i], f[j]) && oracle::z_overlap(f[i], f[j])) want.push_back(j);
    std::sort(got.begin(), got.end());
    CHECK(got == want);
  }
}
