#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "topomap/error.hpp"
#include "topomap/topomap.hpp"

namespace topomap {

using nlohmann::json;

std::string to_string(ExportDim d) {
  switch (d) {
    case ExportDim::d0: return "d0";
    case ExportDim::d1: return "d1";
    case ExportDim::d2: return "d2";
    case ExportDim::d3: return "d3";
  }
  return "?";
}

ExportDim parse_export_dim(const std::string& s) {
  if (s == "d0" || s == "0") return ExportDim::d0;
  if (s == "d1" || s == "1") return ExportDim::d1;
  if (s == "d2" || s == "2") return ExportDim::d2;
  if (s == "d3" || s == "3") return ExportDim::d3;
  throw Error(ErrorCode::InvalidArgument, "unknown export dimension: " + s);
}

std::vector<std::vector<std::array<int, 2>>> boundary_loops(std::span<const std::array<int, 2>> cells) {
  std::set<std::array<int, 2>> in(cells.begin(), cells.end());
  struct DirEdge {
    std::array<int, 2> from, to;
  };
  std::vector<DirEdge> edges;
  for (const auto& c : in) {
    const int x = c[0], y = c[1];
    if (!in.count({x, y - 1})) edges.push_back({{x, y}, {x + 1, y}});
    if (!in.count({x + 1, y})) edges.push_back({{x + 1, y}, {x + 1, y + 1}});
    if (!in.count({x, y + 1})) edges.push_back({{x + 1, y + 1}, {x, y + 1}});
    if (!in.count({x - 1, y})) edges.push_back({{x, y + 1}, {x, y}});
  }
  std::sort(edges.begin(), edges.end(), [](const DirEdge& a, const DirEdge& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  std::multimap<std::array<int, 2>, std::size_t> by_start;
  for (std::size_t i = 0; i < edges.size(); ++i) by_start.emplace(edges[i].from, i);
  std::vector<char> used(edges.size(), 0);
  std::vector<std::vector<std::array<int, 2>>> loops;
  for (std::size_t s = 0; s < edges.size(); ++s) {
    if (used[s]) continue;
    std::vector<std::array<int, 2>> pts;
    std::size_t cur = s;
    while (true) {
      used[cur] = 1;
      pts.push_back(edges[cur].from);
      const auto at = edges[cur].to;
      const int dx = at[0] - edges[cur].from[0], dy = at[1] - edges[cur].from[1];
      // Turn preference: left, straight, right.
      const std::array<int, 2> pref[3] = {{-dy, dx}, {dx, dy}, {dy, -dx}};
      std::size_t next = SIZE_MAX;
      for (const auto& d : pref) {
        auto range = by_start.equal_range(at);
        for (auto it = range.first; it != range.second; ++it) {
          const DirEdge& e = edges[it->second];
          if (!used[it->second] && e.to[0] - e.from[0] == d[0] && e.to[1] - e.from[1] == d[1]) next = it->second;
        }
        if (next != SIZE_MAX) break;
      }
      if (next == SIZE_MAX) break;
      cur = next;
    }
    // Drop collinear vertices.
    std::vector<std::array<int, 2>> simple;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = pts[(i + n - 1) % n];
      const auto& b = pts[i];
      const auto& c = pts[(i + 1) % n];
      if ((b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) != 0) simple.push_back(b);
    }
    loops.push_back(std::move(simple));
  }
  return loops;
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + p.string());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string passage_ply(const MapEdge& e, const GridMeta& meta) {
  std::string s = "ply\nformat ascii 1.0\ncomment passage mesh\nelement vertex " + std::to_string(e.points.size()) +
                  "\nproperty double x\nproperty double y\nproperty double z\nelement face " +
                  std::to_string(e.faces.size()) + "\nproperty list uchar int vertex_indices\nend_header\n";
  for (const LatticePoint& p : e.points) {
    const Vec3 m = meta.lattice_to_metric(p);
    s += fmt(m.x) + ' ' + fmt(m.y) + ' ' + fmt(m.z) + '\n';
  }
  for (const Face& f : e.faces) {
    s += '4';
    for (const LatticePoint& c : f.corners()) {
      const auto idx = std::lower_bound(e.points.begin(), e.points.end(), c) - e.points.begin();
      s += ' ' + std::to_string(idx);
    }
    s += '\n';
  }
  return s;
}

std::vector<LatticePoint> face_points(const std::vector<Face>& faces) {
  std::vector<LatticePoint> pts;
  for (const Face& f : faces)
    for (const LatticePoint& p : f.corners()) pts.push_back(p);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

std::vector<std::filesystem::path> export_map(const TopoMap& map, ExportDim dim, const std::filesystem::path& out_dir) {
  const int d = static_cast<int>(dim);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  const std::string tag = to_string(dim);

  json j;
  j["format_version"] = map.format_version;
  j["dimension"] = tag;
  j["storeys"] = json::array();
  for (std::size_t s = 0; s < map.storeys.size(); ++s) {
    const StoreyInfo& si = map.storeys[s];
    json js{{"index", si.slab.index}, {"node", si.node}};
    if (d >= 1) {
      js["floor_height"] = si.slab.floor_height;
      js["ceiling_height"] = si.slab.ceiling_height;
    }
    if (d >= 2) {
      const std::string leaves = "storey_" + std::to_string(s) + "_leaves_" + tag + ".pgm";
      const std::string r1 = "storey_" + std::to_string(s) + "_region1_" + tag + ".pgm";
      write_pgm(out_dir / leaves, leaf_label_image(map, static_cast<int>(s)));
      write_pgm(out_dir / r1, region1_label_image(map, static_cast<int>(s)));
      written.push_back(out_dir / leaves);
      written.push_back(out_dir / r1);
      js["leaf_label_image"] = leaves;
      js["region1_label_image"] = r1;
    }
    if (d >= 3) {
      const GridMeta& m = si.field.meta();
      js["grid"] = {{"origin", {m.origin.x, m.origin.y, m.origin.z}}, {"voxel", m.voxel}, {"nx", m.nx}, {"ny", m.ny}, {"nz", m.nz}};
    }
    j["storeys"].push_back(std::move(js));
  }

  j["nodes"] = json::array();
  for (const MapNode& n : map.nodes) {
    json jn{{"id", n.id}, {"level", to_string(n.level)}, {"kind", n.kind}, {"parent", n.parent},
            {"storey", n.storey}, {"children", n.children}};
    if (d >= 1) {
      jn["centroid"] = {n.centroid.x, n.centroid.y, n.centroid.z};
      jn["size_m3"] = n.size_m3;
    }
    const ColumnField& f = map.storeys[static_cast<std::size_t>(n.storey)].field;
    const GridMeta& m = f.meta();
    if (d >= 2 && (n.level == NodeLevel::region1 || n.level == NodeLevel::region2)) {
      std::vector<std::array<int, 2>> cells;
      for (std::uint32_t c : map.node_columns(n.id)) cells.push_back({f[c].ix, f[c].iy});
      json loops = json::array();
      for (const auto& loop : boundary_loops(cells)) {
        json jl = json::array();
        for (const auto& p : loop) jl.push_back({m.x_at(p[0]), m.y_at(p[1])});
        loops.push_back(std::move(jl));
      }
      jn["polygon"] = std::move(loops);
    }
    if (d >= 3 && n.level == NodeLevel::volume) {
      json ix = json::array(), iy = json::array(), z1 = json::array(), z2 = json::array();
      for (std::uint32_t c : n.columns) {
        ix.push_back(f[c].ix);
        iy.push_back(f[c].iy);
        z1.push_back(f[c].z1);
        z2.push_back(f[c].z2);
      }
      jn["columns"] = {{"ix", ix}, {"iy", iy}, {"z1", z1}, {"z2", z2}};
    }
    j["nodes"].push_back(std::move(jn));
  }

  j["edges"] = json::array();
  if (d >= 3) std::filesystem::create_directories(out_dir / "passages");
  for (std::size_t i = 0; i < map.edges.size(); ++i) {
    const MapEdge& e = map.edges[i];
    json je{{"id", i}, {"a", e.a}, {"b", e.b}, {"level", to_string(e.level)}, {"storey", e.storey}};
    const GridMeta& m = map.storeys[static_cast<std::size_t>(e.storey)].field.meta();
    if (d >= 2) {
      std::set<std::array<int, 4>> segs;
      int zlo = INT32_MAX, zhi = INT32_MIN;
      for (const Face& f : e.faces) {
        const auto c = f.corners();
        segs.insert({c[0].x, c[0].y, c[1].x, c[1].y});
        zlo = std::min(zlo, f.iz);
        zhi = std::max(zhi, f.iz + 1);
      }
      json pl = json::array();
      for (const auto& s : segs) pl.push_back({{m.x_at(s[0]), m.y_at(s[1])}, {m.x_at(s[2]), m.y_at(s[3])}});
      je["polyline"] = std::move(pl);
      je["z_range"] = {m.z_at(zlo), m.z_at(zhi)};
    }
    if (d >= 3) {
      json faces = json::array();
      for (const Face& f : e.faces) faces.push_back({f.axis, f.ix, f.iy, f.iz});
      je["faces"] = std::move(faces);
      const std::string mesh = "passages/edge_" + std::to_string(i) + ".ply";
      write_text(out_dir / mesh, passage_ply(e, m));
      written.push_back(out_dir / mesh);
      je["mesh"] = mesh;
    }
    j["edges"].push_back(std::move(je));
  }

  const auto path = out_dir / ("map_" + tag + ".json");
  write_text(path, j.dump(1) + "\n");
  written.insert(written.begin(), path);
  return written;
}

TopoMap import_map(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + json_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(json_path.string() + ": " + e.what(), e.byte);
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion)
      throw Error(ErrorCode::Parse, "unsupported format_version in " + json_path.string());
    if (j.at("dimension").get<std::string>() != "d3")
      throw Error(ErrorCode::Parse, "only d3 exports can be imported: " + json_path.string());
    TopoMap map;
    map.format_version = j["format_version"];
    std::vector<GridMeta> metas;
    for (const auto& js : j.at("storeys")) {
      StoreyInfo si;
      si.slab.index = js.at("index");
      si.slab.floor_height = js.at("floor_height");
      si.slab.ceiling_height = js.at("ceiling_height");
      si.node = js.at("node");
      const auto& g = js.at("grid");
      GridMeta m;
      m.origin = {g.at("origin")[0], g.at("origin")[1], g.at("origin")[2]};
      m.voxel = g.at("voxel");
      m.nx = g.at("nx");
      m.ny = g.at("ny");
      m.nz = g.at("nz");
      metas.push_back(m);
      map.storeys.push_back(std::move(si));
    }
    std::vector<std::vector<Column>> storey_cols(map.storeys.size());
    std::vector<std::vector<Column>> node_cols;
    for (const auto& jn : j.at("nodes")) {
      MapNode n;
      n.id = jn.at("id");
      n.level = parse_node_level(jn.at("level"));
      n.kind = jn.at("kind");
      n.parent = jn.at("parent");
      n.storey = jn.at("storey");
      n.children = jn.at("children").get<std::vector<int>>();
      n.centroid = {jn.at("centroid")[0], jn.at("centroid")[1], jn.at("centroid")[2]};
      n.size_m3 = jn.at("size_m3");
      std::vector<Column> cols;
      if (jn.contains("columns")) {
        const auto& c = jn["columns"];
        const auto ix = c.at("ix").get<std::vector<int>>(), iy = c.at("iy").get<std::vector<int>>();
        const auto z1 = c.at("z1").get<std::vector<int>>(), z2 = c.at("z2").get<std::vector<int>>();
        if (iy.size() != ix.size() || z1.size() != ix.size() || z2.size() != ix.size())
          throw Error(ErrorCode::Parse, "column arrays differ in length");
        for (std::size_t k = 0; k < ix.size(); ++k) cols.push_back(Column{ix[k], iy[k], z1[k], z2[k]});
        auto& sc = storey_cols.at(static_cast<std::size_t>(n.storey));
        sc.insert(sc.end(), cols.begin(), cols.end());
      }
      node_cols.push_back(std::move(cols));
      map.nodes.push_back(std::move(n));
    }
    for (std::size_t s = 0; s < map.storeys.size(); ++s)
      map.storeys[s].field = ColumnField(metas[s], std::move(storey_cols[s]));
    for (std::size_t i = 0; i < map.nodes.size(); ++i) {
      const auto all = map.storeys.at(static_cast<std::size_t>(map.nodes[i].storey)).field.columns();
      for (const Column& c : node_cols[i])
        map.nodes[i].columns.push_back(static_cast<std::uint32_t>(std::lower_bound(all.begin(), all.end(), c) - all.begin()));
    }
    for (const auto& je : j.at("edges")) {
      MapEdge e;
      e.a = je.at("a");
      e.b = je.at("b");
      e.level = parse_node_level(je.at("level"));
      e.storey = je.at("storey");
      for (const auto& f : je.at("faces")) e.faces.push_back(Face{f.at(0), f.at(1), f.at(2), f.at(3)});
      e.points = face_points(e.faces);
      map.edges.push_back(std::move(e));
    }
    validate(map);
    return map;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, json_path.string() + ": " + e.what());
  }
}

}  // namespace topomap
