#include "topomap/topomap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topomap/error.hpp"

namespace topomap {

std::string to_string(NodeLevel l) {
  switch (l) {
    case NodeLevel::storey: return "storey";
    case NodeLevel::region1: return "region1";
    case NodeLevel::region2: return "region2";
    case NodeLevel::volume: return "volume";
  }
  return "?";
}

NodeLevel parse_node_level(const std::string& s) {
  if (s == "storey") return NodeLevel::storey;
  if (s == "region1") return NodeLevel::region1;
  if (s == "region2") return NodeLevel::region2;
  if (s == "volume") return NodeLevel::volume;
  throw Error(ErrorCode::Parse, "unknown node level: " + s);
}

std::vector<std::uint32_t> TopoMap::node_columns(int id) const {
  std::vector<std::uint32_t> out;
  std::vector<int> stack{id};
  while (!stack.empty()) {
    const MapNode& n = nodes[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    out.insert(out.end(), n.columns.begin(), n.columns.end());
    stack.insert(stack.end(), n.children.begin(), n.children.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> TopoMap::leaf_regions() const {
  std::vector<int> out(nodes.size(), -1);
  for (const MapNode& n : nodes)
    if (n.level == NodeLevel::volume) out[static_cast<std::size_t>(n.id)] = n.parent;
  return out;
}

Vec3 snapped_centroid(const ColumnField& field, std::span<const std::uint32_t> columns) {
  if (columns.empty()) throw Error(ErrorCode::Internal, "centroid of an empty column set");
  const GridMeta& m = field.meta();
  double sx = 0, sy = 0, sz = 0, w = 0;
  for (std::uint32_t c : columns) {
    const Column& col = field[c];
    const double len = col.length();
    const Vec3 ctr = field.center_m(col);
    sx += len * ctr.x;
    sy += len * ctr.y;
    sz += len * ctr.z;
    w += len;
  }
  const Vec3 mean{sx / w, sy / w, sz / w};
  Vec3 best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::uint32_t c : columns) {
    const Column& col = field[c];
    const int k = std::clamp(static_cast<int>(std::lround((mean.z - m.origin.z) / m.voxel - 0.5)), col.z1, col.z2);
    const Vec3 p{m.x_at(col.ix + 0.5), m.y_at(col.iy + 0.5), m.z_at(k + 0.5)};
    const double d = squared_distance(p, mean);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

TopoMap assemble(std::span<const StoreyBuild> storeys) {
  TopoMap map;
  auto add_node = [&](NodeLevel level, std::string kind, int storey) -> MapNode& {
    MapNode n;
    n.id = static_cast<int>(map.nodes.size());
    n.level = level;
    n.kind = std::move(kind);
    n.storey = storey;
    map.nodes.push_back(std::move(n));
    return map.nodes.back();
  };
  const std::size_t ns = storeys.size();
  std::vector<int> r1_base(ns), r2_base(ns), vol_base(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    map.storeys.push_back(StoreyInfo{storeys[s].slab, storeys[s].field, static_cast<int>(map.nodes.size())});
    add_node(NodeLevel::storey, "storey", static_cast<int>(s));
  }
  for (std::size_t s = 0; s < ns; ++s) {
    r1_base[s] = static_cast<int>(map.nodes.size());
    for (const Region& r : storeys[s].hierarchy.regions1) {
      MapNode& n = add_node(NodeLevel::region1, to_string(r.kind), static_cast<int>(s));
      n.parent = map.storeys[s].node;
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    r2_base[s] = static_cast<int>(map.nodes.size());
    for (const SubRegion& r : storeys[s].hierarchy.regions2) {
      MapNode& n = add_node(NodeLevel::region2, "subregion", static_cast<int>(s));
      n.parent = r1_base[s] + r.parent;
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const StoreyHierarchy& h = storeys[s].hierarchy;
    vol_base[s] = static_cast<int>(map.nodes.size());
    for (const Volume& v : h.volumes.volumes) {
      MapNode& n = add_node(NodeLevel::volume, "volume", static_cast<int>(s));
      n.columns = v.columns;
      const auto& leaf = h.leaves[static_cast<std::size_t>(h.leaf_of[static_cast<std::size_t>(v.id)])];
      n.parent = leaf.first == 1 ? r1_base[s] + leaf.second : r2_base[s] + leaf.second;
    }
  }
  for (const MapNode& n : map.nodes)
    if (n.parent >= 0) map.nodes[static_cast<std::size_t>(n.parent)].children.push_back(n.id);

  // Sizes bottom-up (children always have larger ids than their parent).
  for (auto it = map.nodes.rbegin(); it != map.nodes.rend(); ++it) {
    if (it->level == NodeLevel::volume) {
      const ColumnField& f = map.storeys[static_cast<std::size_t>(it->storey)].field;
      const double v3 = f.meta().voxel * f.meta().voxel * f.meta().voxel;
      long long vox = 0;
      for (std::uint32_t c : it->columns) vox += f[c].length();
      it->size_m3 = static_cast<double>(vox) * v3;
    }
    if (it->parent >= 0) map.nodes[static_cast<std::size_t>(it->parent)].size_m3 += it->size_m3;
  }
  for (MapNode& n : map.nodes) {
    const auto cols = map.node_columns(n.id);
    if (!cols.empty()) n.centroid = snapped_centroid(map.storeys[static_cast<std::size_t>(n.storey)].field, cols);
  }

  auto add_edge = [&](int a, int b, NodeLevel level, int storey, const Passage& p) {
    if (a > b) std::swap(a, b);
    map.edges.push_back(MapEdge{a, b, level, storey, p.faces, p.points});
  };
  for (std::size_t s = 0; s < ns; ++s) {
    const StoreyHierarchy& h = storeys[s].hierarchy;
    const int si = static_cast<int>(s);
    for (const Passage& p : h.region1_edges) add_edge(r1_base[s] + p.a, r1_base[s] + p.b, NodeLevel::region1, si, p);
    auto leaf_node = [&](int leaf) {
      const auto& l = h.leaves[static_cast<std::size_t>(leaf)];
      return l.first == 1 ? r1_base[s] + l.second : r2_base[s] + l.second;
    };
    for (const Passage& p : h.leaf_edges) {
      if (h.leaves[static_cast<std::size_t>(p.a)].first != 2 && h.leaves[static_cast<std::size_t>(p.b)].first != 2) continue;
      add_edge(leaf_node(p.a), leaf_node(p.b), NodeLevel::region2, si, p);
    }
    for (const Passage& p : h.volume_graph.edges) add_edge(vol_base[s] + p.a, vol_base[s] + p.b, NodeLevel::volume, si, p);
  }
  validate(map);
  return map;
}

void validate(const TopoMap& map) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::Internal, "topomap invariant violated: " + what); };
  if (map.storeys.empty()) fail("no storeys");
  for (std::size_t i = 0; i < map.nodes.size(); ++i) {
    const MapNode& n = map.nodes[i];
    if (n.id != static_cast<int>(i)) fail("node id does not match its index");
    if (n.storey < 0 || static_cast<std::size_t>(n.storey) >= map.storeys.size()) fail("node storey out of range");
    if (n.level == NodeLevel::storey) {
      if (n.parent != -1) fail("storey with parent");
      if (map.storeys[static_cast<std::size_t>(n.storey)].node != n.id) fail("storey node mismatch");
    } else {
      if (n.parent < 0 || static_cast<std::size_t>(n.parent) >= map.nodes.size()) fail("node without parent");
      const MapNode& p = map.nodes[static_cast<std::size_t>(n.parent)];
      if (static_cast<int>(p.level) >= static_cast<int>(n.level)) fail("parent level not above child");
      if (p.storey != n.storey) fail("parent in another storey");
      if (std::count(p.children.begin(), p.children.end(), n.id) != 1) fail("child missing from parent");
    }
    if (n.level != NodeLevel::volume && !n.columns.empty()) fail("non-volume node owns columns directly");
    if (n.level == NodeLevel::volume && (n.columns.empty() || !n.children.empty())) fail("malformed volume node");
  }
  // Column partition per storey and centroid containment.
  for (std::size_t s = 0; s < map.storeys.size(); ++s) {
    const ColumnField& f = map.storeys[s].field;
    std::vector<char> owned(f.size(), 0);
    for (const MapNode& n : map.nodes) {
      if (n.storey != static_cast<int>(s) || n.level != NodeLevel::volume) continue;
      for (std::uint32_t c : n.columns) {
        if (c >= f.size() || owned[c]) fail("columns do not partition the storey");
        owned[c] = 1;
      }
    }
    if (std::count(owned.begin(), owned.end(), char{1}) != static_cast<std::ptrdiff_t>(f.size())) fail("unowned column");
  }
  for (const MapNode& n : map.nodes) {
    const ColumnField& f = map.storeys[static_cast<std::size_t>(n.storey)].field;
    const auto cols = map.node_columns(n.id);
    if (cols.empty()) continue;
    const GridMeta& m = f.meta();
    const double tol = 1e-9 * std::max(1.0, m.voxel);
    bool inside = false;
    for (std::uint32_t c : cols) {
      const Column& col = f[c];
      if (n.centroid.x >= m.x_at(col.ix) - tol && n.centroid.x <= m.x_at(col.ix + 1) + tol &&
          n.centroid.y >= m.y_at(col.iy) - tol && n.centroid.y <= m.y_at(col.iy + 1) + tol &&
          n.centroid.z >= f.bottom_m(col) - tol && n.centroid.z <= f.top_m(col) + tol) {
        inside = true;
        break;
      }
    }
    if (!inside) fail("centroid of node " + std::to_string(n.id) + " outside its free space");
  }
  for (const MapEdge& e : map.edges) {
    if (e.a == e.b) fail("self loop");
    if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(e.b) >= map.nodes.size()) fail("edge endpoint missing");
    if (map.nodes[static_cast<std::size_t>(e.a)].storey != e.storey || map.nodes[static_cast<std::size_t>(e.b)].storey != e.storey)
      fail("edge crosses storeys");
    if (e.faces.empty()) fail("edge without passage mesh");
  }
}

namespace {

LabelImage label_image_for(const TopoMap& map, int storey, const std::vector<int>& label_of_node) {
  const ColumnField& f = map.storeys[static_cast<std::size_t>(storey)].field;
  const GridMeta& m = f.meta();
  LabelImage img(m.nx, m.ny);
  // Per cell, voxels owned by each label; the label with most voxels wins
  // (smaller label on ties).
  std::vector<std::vector<std::pair<std::uint32_t, long long>>> acc(m.cell_count());
  for (const MapNode& n : map.nodes) {
    if (n.storey != storey || n.level != NodeLevel::volume) continue;
    int up = n.id;
    while (up >= 0 && label_of_node[static_cast<std::size_t>(up)] == 0) up = map.nodes[static_cast<std::size_t>(up)].parent;
    if (up < 0) continue;
    const auto label = static_cast<std::uint32_t>(label_of_node[static_cast<std::size_t>(up)]);
    for (std::uint32_t c : n.columns) {
      const Column& col = f[c];
      auto& list = acc[m.cell_index(col.ix, col.iy)];
      auto it = std::find_if(list.begin(), list.end(), [&](const auto& e) { return e.first == label; });
      if (it == list.end()) list.emplace_back(label, col.length());
      else it->second += col.length();
    }
  }
  for (int ix = 0; ix < m.nx; ++ix)
    for (int iy = 0; iy < m.ny; ++iy) {
      const auto& list = acc[m.cell_index(ix, iy)];
      std::uint32_t l = 0;
      long long cnt = -1;
      for (const auto& [lab, v] : list)
        if (v > cnt || (v == cnt && lab < l)) l = lab, cnt = v;
      img.at(ix, iy) = l;
    }
  return img;
}

}  // namespace

LabelImage leaf_label_image(const TopoMap& map, int storey) {
  std::vector<int> label(map.nodes.size(), 0);
  int next = 0;
  for (const MapNode& n : map.nodes) {
    if (n.storey != storey) continue;
    const bool leaf_r1 = n.level == NodeLevel::region1 &&
                         std::none_of(n.children.begin(), n.children.end(), [&](int c) {
                           return map.nodes[static_cast<std::size_t>(c)].level == NodeLevel::region2;
                         });
    if (leaf_r1 || n.level == NodeLevel::region2) label[static_cast<std::size_t>(n.id)] = ++next;
  }
  return label_image_for(map, storey, label);
}

LabelImage region1_label_image(const TopoMap& map, int storey) {
  std::vector<int> label(map.nodes.size(), 0);
  int next = 0;
  for (const MapNode& n : map.nodes)
    if (n.storey == storey && n.level == NodeLevel::region1) label[static_cast<std::size_t>(n.id)] = ++next;
  return label_image_for(map, storey, label);
}

}  // namespace topomap
