#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "topomap/passages.hpp"
#include "topomap/volumes.hpp"

namespace topomap {

enum class RegionKind { room, connection };

std::string to_string(RegionKind k);
RegionKind parse_region_kind(const std::string& s);

struct Region {
  int id = 0;
  RegionKind kind = RegionKind::room;
  std::vector<int> volumes;  // ascending
  int storey = 0;

  friend bool operator==(const Region&, const Region&) = default;
};

struct RegionGraph {
  std::vector<Region> regions;
  std::vector<int> region_of;  // per volume
  std::vector<Passage> edges;  // endpoints are region ids
};

// Volumes strictly larger than a_th. Throws NoSeed when empty.
std::vector<int> select_seeds(std::span<const Volume> volumes, double a_th);

// Connected components of the seed-induced subgraph, each ascending, ordered
// by smallest seed.
std::vector<std::vector<int>> filter_seeds(std::span<const int> seeds, const VolumeGraph& graph);

// Breadth-first growth from every seed cluster; growth never enters any seed
// volume. Volumes reached from more than one cluster become singleton
// connection regions, unreached volumes singleton rooms.
std::vector<Region> grow_regions(const VolumeGraph& graph, std::span<const std::vector<int>> clusters);

// Region id per volume; throws if the regions do not partition the volumes.
std::vector<int> region_assignment(std::span<const Region> regions, std::size_t volume_count);

// Unions the faces of every volume passage that crosses between two regions
// and re-clusters them per region pair.
std::vector<Passage> lift_passages(const VolumeGraph& graph, std::span<const int> group_of, double d_th_lattice);

// select_seeds + filter_seeds + grow_regions + lift_passages.
RegionGraph generate_regions(const VolumeGraph& graph, std::span<const Volume> volumes, double a_th,
                             double d_th_lattice, int storey = 0);

}  // namespace topomap
