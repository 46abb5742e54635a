#include "topomap/regions.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>

#include "topomap/disjoint_set.hpp"
#include "topomap/error.hpp"

namespace topomap {

std::string to_string(RegionKind k) { return k == RegionKind::room ? "room" : "connection"; }

RegionKind parse_region_kind(const std::string& s) {
  if (s == "room") return RegionKind::room;
  if (s == "connection") return RegionKind::connection;
  throw Error(ErrorCode::Parse, "unknown region kind: " + s);
}

namespace {

std::vector<std::vector<int>> adjacency(const VolumeGraph& graph) {
  std::vector<std::vector<int>> adj(graph.vertex_count);
  for (const Passage& p : graph.edges) {
    adj[static_cast<std::size_t>(p.a)].push_back(p.b);
    adj[static_cast<std::size_t>(p.b)].push_back(p.a);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

}  // namespace

std::vector<int> select_seeds(std::span<const Volume> volumes, double a_th) {
  if (!(a_th > 0.0)) throw Error(ErrorCode::InvalidArgument, "a_th must be positive");
  std::vector<int> seeds;
  double largest = 0.0;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    largest = std::max(largest, volumes[i].size_m3);
    if (volumes[i].size_m3 > a_th) seeds.push_back(static_cast<int>(i));
  }
  if (seeds.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "no volume exceeds a_th = %.3f m3 (largest volume %.3f m3)", a_th, largest);
    throw Error(ErrorCode::NoSeed, buf);
  }
  return seeds;
}

std::vector<std::vector<int>> filter_seeds(std::span<const int> seeds, const VolumeGraph& graph) {
  std::vector<int> slot(graph.vertex_count, -1);
  std::vector<int> sorted(seeds.begin(), seeds.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) slot[static_cast<std::size_t>(sorted[i])] = static_cast<int>(i);
  DisjointSet ds(sorted.size());
  for (const Passage& p : graph.edges) {
    const int sa = slot[static_cast<std::size_t>(p.a)];
    const int sb = slot[static_cast<std::size_t>(p.b)];
    if (sa >= 0 && sb >= 0) ds.unite(static_cast<std::size_t>(sa), static_cast<std::size_t>(sb));
  }
  std::vector<std::vector<int>> out;
  for (const auto& g : groups(ds)) {
    std::vector<int> cluster;
    for (std::size_t i : g) cluster.push_back(sorted[i]);
    out.push_back(std::move(cluster));
  }
  return out;
}

std::vector<Region> grow_regions(const VolumeGraph& graph, std::span<const std::vector<int>> clusters) {
  const std::size_t n = graph.vertex_count;
  const auto adj = adjacency(graph);
  std::vector<char> is_seed(n, 0);
  for (const auto& c : clusters)
    for (int s : c) {
      if (is_seed[static_cast<std::size_t>(s)]) throw Error(ErrorCode::InvalidArgument, "seed clusters overlap");
      is_seed[static_cast<std::size_t>(s)] = 1;
    }

  std::vector<int> count(n, 0);
  std::vector<std::vector<int>> grown(clusters.size());
  std::vector<int> stamp(n, -1);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    std::deque<int> frontier(clusters[k].begin(), clusters[k].end());
    for (int s : clusters[k]) stamp[static_cast<std::size_t>(s)] = static_cast<int>(k);
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop_front();
      for (int u : adj[static_cast<std::size_t>(v)]) {
        const auto uu = static_cast<std::size_t>(u);
        if (is_seed[uu] || stamp[uu] == static_cast<int>(k)) continue;
        stamp[uu] = static_cast<int>(k);
        ++count[uu];
        grown[k].push_back(u);
        frontier.push_back(u);
      }
    }
  }

  std::vector<Region> out;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    Region r;
    r.id = static_cast<int>(out.size());
    r.volumes = clusters[k];
    for (int v : grown[k])
      if (count[static_cast<std::size_t>(v)] == 1) r.volumes.push_back(v);
    std::sort(r.volumes.begin(), r.volumes.end());
    out.push_back(std::move(r));
  }
  for (std::size_t v = 0; v < n; ++v)
    if (count[v] > 1) out.push_back(Region{static_cast<int>(out.size()), RegionKind::connection, {int(v)}, 0});
  for (std::size_t v = 0; v < n; ++v)
    if (count[v] == 0 && !is_seed[v]) out.push_back(Region{static_cast<int>(out.size()), RegionKind::room, {int(v)}, 0});
  return out;
}

std::vector<int> region_assignment(std::span<const Region> regions, std::size_t volume_count) {
  std::vector<int> region_of(volume_count, -1);
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (int v : regions[r].volumes) {
      if (v < 0 || static_cast<std::size_t>(v) >= volume_count || region_of[static_cast<std::size_t>(v)] >= 0)
        throw Error(ErrorCode::Internal, "regions do not partition the volumes");
      region_of[static_cast<std::size_t>(v)] = static_cast<int>(r);
    }
  for (int r : region_of)
    if (r < 0) throw Error(ErrorCode::Internal, "volume without region");
  return region_of;
}

std::vector<Passage> lift_passages(const VolumeGraph& graph, std::span<const int> group_of, double d_th_lattice) {
  FaceMap faces;
  for (const Passage& p : graph.edges) {
    const int ga = group_of[static_cast<std::size_t>(p.a)];
    const int gb = group_of[static_cast<std::size_t>(p.b)];
    if (ga == gb) continue;
    auto& dst = faces[{std::min(ga, gb), std::max(ga, gb)}];
    dst.insert(dst.end(), p.faces.begin(), p.faces.end());
  }
  return build_passages(std::move(faces), d_th_lattice);
}

RegionGraph generate_regions(const VolumeGraph& graph, std::span<const Volume> volumes, double a_th,
                             double d_th_lattice, int storey) {
  const auto seeds = select_seeds(volumes, a_th);
  const auto clusters = filter_seeds(seeds, graph);
  RegionGraph rg;
  rg.regions = grow_regions(graph, clusters);
  for (Region& r : rg.regions) r.storey = storey;
  rg.region_of = region_assignment(rg.regions, graph.vertex_count);
  rg.edges = lift_passages(graph, rg.region_of, d_th_lattice);
  return rg;
}

}  // namespace topomap
