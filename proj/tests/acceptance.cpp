// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "topomap/areagraph2d.hpp"
#include "topomap/cloud_io.hpp"
#include "topomap/error.hpp"
#include "topomap/evaluation.hpp"
#include "topomap/fixtures.hpp"
#include "topomap/pipeline.hpp"
#include "topomap/regions.hpp"
#include "topomap/storey_segmentation.hpp"
#include "topomap/topomap.hpp"
#include "topomap/volumes.hpp"

using namespace topomap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Column index whose cell contains (x, y) and whose layers contain z; -1 if none.
long column_at(const ColumnField& f, double x, double y, double z) {
  const GridMeta& m = f.meta();
  const int ix = static_cast<int>(std::floor((x - m.origin.x) / m.voxel));
  const int iy = static_cast<int>(std::floor((y - m.origin.y) / m.voxel));
  const int iz = static_cast<int>(std::floor((z - m.origin.z) / m.voxel));
  if (!m.in_bounds(ix, iy)) return -1;
  const auto cols = f.at(ix, iy);
  for (std::size_t k = 0; k < cols.size(); ++k)
    if (cols[k].z1 <= iz && iz <= cols[k].z2) return static_cast<long>(f.first_index(ix, iy) + k);
  return -1;
}

struct StoreyStages {
  ColumnField field;
  VolumeSet volumes;
  VolumeGraph graph;
};

// Grown volumes and their passages for storey 0, following the pipeline's stages.
StoreyStages grow_storey0(const PointCloud& input, const PipelineConfig& cfg) {
  PointCloud c = voxel_downsample(input, cfg.downsample);
  c = denoise_clusters(c, cfg.denoise_link, cfg.denoise_min_points).cloud;
  const auto sets = detect_peaks(build_z_histogram(input, cfg.bin_size), cfg.window_sizes);
  const auto parts = label_and_split(c, select_peaks(sets), cfg.bin_size, cfg.slab_margin);
  StoreyStages s;
  s.field = extract_columns(rasterize(parts.at(0).cloud, parts[0].slab, cfg.voxel, cfg.memory_cap));
  s.volumes = grow_volumes(s.field, cfg.rel_tol);
  s.graph = generate_passages(s.field, s.volumes.volume_of, s.volumes.volumes.size(), cfg.d_th_m());
  return s;
}

double leaf_mcc(const Fixture& f, const TopoMap& map) {
  const LabelImage seg = leaf_label_image(map, 0);
  const LabelImage gt = render_truth(f.truth, map.storeys.at(0).field.meta());
  return evaluate(seg, gt).aggregate;
}

Outcome hierarchy_structure() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const FixtureParams fp;
  const Fixture f = make_fixture(FixtureKind::two_rooms_door, fp);
  const PipelineConfig cfg;
  const TopoMap map = run_pipeline(f.cloud, cfg).map;
  const double dt = seconds_since(t0);

  int rooms = 0, connections = 0, region_edges = 0;
  std::vector<int> conn_ids;
  for (const MapNode& n : map.nodes) {
    if (n.level != NodeLevel::region1) continue;
    if (n.kind == "room") ++rooms;
    if (n.kind == "connection") {
      ++connections;
      conn_ids.push_back(n.id);
    }
  }
  for (const MapEdge& e : map.edges)
    if (e.level == NodeLevel::region1) ++region_edges;
  if (rooms != 2 || connections != 1)
    o.fail("region1 nodes: " + std::to_string(rooms) + " room, " + std::to_string(connections) + " connection");
  if (region_edges != 2) o.fail("region edges: " + std::to_string(region_edges));

  const ColumnField& field = map.storeys.at(0).field;
  const GridMeta& m = field.meta();
  const Box2 door = f.truth.openings.at(0);
  std::size_t outside = 0, total = 0;
  for (int id : conn_ids)
    for (std::uint32_t c : map.node_columns(id)) {
      const Column& col = field[c];
      const double x = m.x_at(col.ix + 0.5), y = m.y_at(col.iy + 0.5);
      const bool under = x >= door.x0 - m.voxel && x <= door.x1 + m.voxel && y >= door.y0 - m.voxel &&
                         y <= door.y1 + m.voxel && field.top_m(col) <= fp.door_height + m.voxel;
      outside += under ? 0 : 1;
      ++total;
    }
  if (total == 0) o.fail("connection region has no columns");
  if (outside) o.fail(std::to_string(outside) + " of " + std::to_string(total) + " connection columns outside the door span");
  if (dt >= 5.0) o.fail("runtime " + fmt("%.2f s", dt));
  o.note("3 regions (2 room, 1 connection), 2 edges, " + std::to_string(total) + " connection columns under the door, " +
         fmt("%.2f s", dt));
  return o;
}

std::size_t grown_volumes(const Fixture& f) {
  const RunReport r = run_pipeline(f.cloud, PipelineConfig{}).report;
  std::size_t n = 0;
  for (const StoreyCounts& s : r.storeys) n += s.volumes_grown;
  return n;
}

Outcome slanted_ceiling() {
  Outcome o;
  for (double slope : {0.0, 0.02, 0.05}) {
    FixtureParams p;
    p.slope = slope;
    const std::size_t n = grown_volumes(make_fixture(FixtureKind::slanted_ceiling, p));
    if (n != 1) o.fail("slope " + fmt("%.2f", slope) + " gave " + std::to_string(n) + " volumes");
  }
  FixtureParams p;
  p.step = 0.3;
  const std::size_t stepped = grown_volumes(make_fixture(FixtureKind::slanted_ceiling, p));
  if (stepped < 2) o.fail("30% step gave " + std::to_string(stepped) + " volume");
  o.note("slopes 0/2/5% -> 1 volume; 30% step -> " + std::to_string(stepped) + " volumes");
  return o;
}

Outcome storey_detection() {
  Outcome o;
  const Fixture f = make_fixture(FixtureKind::two_storey);
  const PipelineConfig cfg;
  const auto sets = detect_peaks(build_z_histogram(f.cloud, cfg.bin_size), cfg.window_sizes);
  const std::vector<double> peaks = select_peaks(sets);
  if (peaks.size() != 4) {
    o.fail(std::to_string(peaks.size()) + " peaks");
    return o;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(peaks[i] - f.truth.peak_heights.at(i)));
  if (worst > 2.0 * cfg.bin_size) o.fail("peak off by " + fmt("%.4f m", worst));

  const auto parts = label_and_split(f.cloud, peaks, cfg.bin_size, cfg.slab_margin);
  if (parts.size() != 2) o.fail(std::to_string(parts.size()) + " storeys");
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const StoreySlab& s = parts[k].slab;
    if (!(s.floor_height < s.ceiling_height)) o.fail("storey " + std::to_string(k) + " floor not below ceiling");
    if (k + 1 < parts.size() && !(s.ceiling_height < parts[k + 1].slab.floor_height))
      o.fail("ceiling of storey " + std::to_string(k) + " not below the next floor");
  }

  using Key = std::tuple<double, double, double>;
  std::map<Key, std::pair<int, int>> seen;  // (input multiplicity, assigned multiplicity)
  for (const Vec3& p : f.cloud.points()) ++seen[{p.x, p.y, p.z}].first;
  for (const StoreyPart& part : parts)
    for (const Vec3& p : part.cloud.points()) ++seen[{p.x, p.y, p.z}].second;
  const double lo = peaks.front() - cfg.bin_size, hi = peaks.back();
  std::size_t doubled = 0, missing = 0, interior = 0;
  for (const auto& [k, c] : seen) {
    if (c.second > c.first) ++doubled;
    const double z = std::get<2>(k);
    if (z >= lo && z <= hi) {
      interior += static_cast<std::size_t>(c.first);
      if (c.second != c.first) ++missing;
    }
  }
  if (doubled) o.fail(std::to_string(doubled) + " points assigned twice");
  if (missing) o.fail(std::to_string(missing) + " interior points unassigned");
  o.note("4 alternating peaks within " + fmt("%.4f m", worst) + ", " + std::to_string(interior) +
         " interior points assigned once");
  return o;
}

struct PassageTally {
  std::size_t passages = 0, violations = 0, sets_checked = 0, cluster_mismatch = 0;
};

// Checks the passages of one field against face separation and, for contact
// sets of at most 100 corners, against the union-find clustering oracle.
void check_passages(const ColumnField& field, const std::vector<int>& volume_of, const std::vector<Passage>& edges,
                    double d_lat, PassageTally& t) {
  std::map<std::pair<int, int>, std::set<std::vector<LatticePoint>>> by_pair;
  for (const Passage& p : edges) {
    ++t.passages;
    t.violations += oracle::separation_violations(field, volume_of, p);
    by_pair[{p.a, p.b}].insert(p.points);
  }
  for (const auto& [pair, faces] : contact_faces(field, volume_of)) {
    std::set<LatticePoint> corners;
    for (const Face& face : faces)
      for (const LatticePoint& c : face.corners()) corners.insert(c);
    if (corners.size() > 100) continue;
    const std::vector<LatticePoint> lp(corners.begin(), corners.end());
    std::vector<Vec3> pts;
    for (const LatticePoint& c : lp) pts.push_back({double(c.x), double(c.y), double(c.z)});
    const auto expect = oracle::brute_clusters(pts, d_lat);
    auto got = cluster_contact_points(pts, d_lat);
    std::sort(got.begin(), got.end());
    std::set<std::vector<LatticePoint>> expect_sets;
    for (const auto& cl : expect) {
      std::vector<LatticePoint> v;
      for (std::size_t i : cl) v.push_back(lp[i]);
      expect_sets.insert(v);
    }
    ++t.sets_checked;
    if (got != expect || by_pair[pair] != expect_sets) ++t.cluster_mismatch;
  }
}

Outcome passage_correctness() {
  Outcome o;
  const PipelineConfig cfg;
  const double d_lat = cfg.d_th_m() / cfg.voxel;
  PassageTally fix, rnd;
  for (FixtureKind kind : {FixtureKind::two_rooms_door, FixtureKind::slanted_ceiling, FixtureKind::two_storey,
                           FixtureKind::corridor_T, FixtureKind::table_room, FixtureKind::glass_front}) {
    const TopoMap map = run_pipeline(make_fixture(kind).cloud, cfg).map;
    for (std::size_t s = 0; s < map.storeys.size(); ++s) {
      const ColumnField& field = map.storeys[s].field;
      std::vector<int> volume_of(field.size(), -1);
      for (const MapNode& n : map.nodes)
        if (n.level == NodeLevel::volume && n.storey == static_cast<int>(s))
          for (std::uint32_t c : n.columns) volume_of[c] = n.id;
      std::vector<Passage> edges;
      for (const MapEdge& e : map.edges)
        if (e.level == NodeLevel::volume && e.storey == static_cast<int>(s)) edges.push_back({e.a, e.b, e.faces, e.points});
      check_passages(field, volume_of, edges, d_lat, fix);
    }
  }
  for (unsigned seed = 0; seed < 20; ++seed) {
    const ColumnField f = extract_columns(oracle::random_grid(seed, 20));
    const VolumeSet v = grow_volumes(f, cfg.rel_tol);
    const VolumeGraph g = generate_passages(f, v.volume_of, v.volumes.size(), 0.15);
    check_passages(f, v.volume_of, g.edges, 0.15 / f.meta().voxel, rnd);
  }
  for (const PassageTally* t : {&fix, &rnd}) {
    const std::string what = t == &fix ? "fixtures" : "random grids";
    if (t->violations) o.fail(what + ": " + std::to_string(t->violations) + " faces fail to separate their volumes");
    if (t->cluster_mismatch)
      o.fail(what + ": " + std::to_string(t->cluster_mismatch) + " contact sets cluster differently from the oracle");
    if (t->sets_checked == 0) o.fail(what + ": no contact set of at most 100 points");
  }
  o.note(std::to_string(fix.passages) + " fixture and " + std::to_string(rnd.passages) +
         " random-grid passages separate their volumes; " + std::to_string(fix.sets_checked + rnd.sets_checked) +
         " contact sets match the union-find oracle");
  return o;
}

Outcome column_volume_oracles() {
  Outcome o;
  std::size_t column_bad = 0, volume_bad = 0;
  for (unsigned seed = 0; seed < 60; ++seed) {
    const OccupancyGrid g = oracle::random_grid(seed, 32);
    const ColumnField f = extract_columns(g);
    if (std::vector<Column>(f.columns().begin(), f.columns().end()) != oracle::brute_columns(g)) ++column_bad;
    const VolumeSet v = grow_volumes(f, 0.1);
    std::size_t covered = 0;
    for (const Volume& vol : v.volumes) covered += vol.columns.size();
    if (covered != f.size() || !oracle::same_partition(v.volume_of, oracle::rule_components(f, 0.1))) ++volume_bad;
  }
  if (column_bad) o.fail(std::to_string(column_bad) + " seeds with column mismatches");
  if (volume_bad) o.fail(std::to_string(volume_bad) + " seeds with volume partition mismatches");
  o.note("60 random 32^3 grids match the run scan and the top-height rule partition");
  return o;
}

Outcome alpha_shape() {
  Outcome o;
  std::size_t bad = 0;
  for (unsigned seed = 0; seed < 25; ++seed) {
    std::mt19937 rng(1000 + seed);
    std::vector<Vec2> pts;
    const int n = 3 + static_cast<int>(rng() % 198);
    for (int i = 0; i < n; ++i) pts.push_back({testutil::uniform(rng, 0, 5), testutil::uniform(rng, 0, 5)});
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double alpha = testutil::uniform(rng, 0.2, 2.0);
    if (alpha_shape_edges(pts, alpha) != oracle::brute_alpha(pts, alpha)) ++bad;
  }
  if (bad) o.fail(std::to_string(bad) + " of 25 point sets differ from the empty-circle oracle");

  // Both corridor arms are 1.6 m wide and there is no room: alpha just above
  // the corridor width, and the default.
  const Fixture f = make_fixture(FixtureKind::corridor_T);
  for (double alpha : {1.8, 2.5}) {
    PipelineConfig cfg;
    cfg.alpha = alpha;
    const TopoMap map = run_pipeline(f.cloud, cfg).map;
    const LabelImage seg = leaf_label_image(map, 0);
    const LabelImage gt = render_truth(f.truth, map.storeys.at(0).field.meta());
    std::vector<int> a, b;
    std::size_t stray = 0;
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
      if ((seg.labels[i] == 0) != (gt.labels[i] == 0)) ++stray;
      if (seg.labels[i] || gt.labels[i]) {
        a.push_back(static_cast<int>(seg.labels[i]));
        b.push_back(static_cast<int>(gt.labels[i]));
      }
    }
    const std::set<int> distinct(a.begin(), a.end());
    const double score = evaluate(seg, gt).aggregate;
    if (stray || !oracle::same_partition(a, b) || distinct.size() != 3 || score != 1.0)
      o.fail("alpha " + fmt("%.1f", alpha) + ": " + std::to_string(distinct.size()) + " leaves, " +
             std::to_string(stray) + " stray cells, mcc " + fmt("%.6f", score));
  }
  o.note("25 random sets match the oracle; corridor_T splits into 3 leaves equal to gt (mcc 1.0) at alpha 1.8 and 2.5");
  return o;
}

Outcome mcc_formula() {
  Outcome o;
  if (mcc(2, 1, 1, 2) != 1.0 / 3.0) o.fail("mcc(2,1,1,2) = " + fmt("%.17g", mcc(2, 1, 1, 2)));
  LabelImage img(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) img.at(x, y) = static_cast<std::uint32_t>(1 + (x >= 4) + 2 * (y >= 5));
  const double perfect = evaluate(img, img).aggregate;
  if (perfect != 1.0) o.fail("perfect match scores " + fmt("%.17g", perfect));
  std::mt19937 rng(42);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double tp = rng() % 1000 + 1, fp = rng() % 1000 + 1, fn = rng() % 1000 + 1, tn = rng() % 1000 + 1;
    const double m = mcc(tp, fp, fn, tn);
    // Swapping the predicted classes negates; swapping both classes preserves.
    worst = std::max({worst, std::abs(mcc(fp, tp, tn, fn) + m), std::abs(mcc(tn, fn, fp, tp) - m)});
  }
  if (worst > 1e-12) o.fail("class swap deviates by " + fmt("%.3g", worst));
  o.note("mcc(2,1,1,2) = 1/3, perfect = 1, swap error " + fmt("%.1e", worst));
  return o;
}

Outcome pipeline_mcc() {
  Outcome o;
  for (FixtureKind kind : {FixtureKind::two_rooms_door, FixtureKind::corridor_T}) {
    const auto t0 = std::chrono::steady_clock::now();
    const Fixture f = make_fixture(kind);
    const TopoMap map = run_pipeline(f.cloud, PipelineConfig{}).map;
    const double score = leaf_mcc(f, map);
    const double dt = seconds_since(t0);
    if (score < 0.97) o.fail(to_string(kind) + " mcc " + fmt("%.4f", score));
    if (dt >= 10.0) o.fail(to_string(kind) + " took " + fmt("%.2f s", dt));
    o.note(to_string(kind) + " mcc " + fmt("%.4f", score) + " in " + fmt("%.2f s", dt));
  }
  return o;
}

Outcome seed_threshold_sweep() {
  Outcome o;
  const FixtureParams fp;
  const Fixture f = make_fixture(FixtureKind::two_rooms_door, fp);
  const PipelineConfig cfg;
  const StoreyStages s = grow_storey0(f.cloud, cfg);
  const Box2 door = f.truth.openings.at(0);
  const double z = f.truth.peak_heights.at(0) + 1.0;
  auto volume_size_at = [&](double x, double y) {
    const long c = column_at(s.field, x, y, z);
    if (c < 0) throw Error(ErrorCode::Internal, "no column at probe point");
    return s.volumes.volumes[static_cast<std::size_t>(s.volumes.volume_of[static_cast<std::size_t>(c)])].size_m3;
  };
  const double R = fp.room_size;
  const double door_v = volume_size_at(door.x0, 0.5 * (door.y0 + door.y1));
  const double room_v = std::min(volume_size_at(0.5 * R, 0.5 * R), volume_size_at(1.5 * R, 0.5 * R));
  const double lo = 2.0 * door_v, hi = 0.5 * room_v;
  if (!(lo < hi)) {
    o.fail("empty interval [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]");
    return o;
  }
  constexpr int kSteps = 40;
  int bad = 0;
  for (int i = 0; i <= kSteps; ++i) {
    const double a_th = lo + (hi - lo) * i / kSteps;
    const auto seeds = select_seeds(s.volumes.volumes, a_th);
    if (filter_seeds(seeds, s.graph).size() != 2) ++bad;
  }
  if (bad) o.fail(std::to_string(bad) + " of " + std::to_string(kSteps + 1) + " thresholds give other than 2 clusters");
  o.note("2 seed clusters at all " + std::to_string(kSteps + 1) + " thresholds in [" + fmt("%.3f", lo) + ", " +
         fmt("%.3f", hi) + "] m^3");
  return o;
}

Outcome performance() {
  Outcome o;
  FixtureParams p;
  p.rooms_per_side = 12;
  p.room_width = 50.0 / 12.0;
  p.room_depth = 8.95;
  p.corridor_width = 2.1;
  const Fixture f = make_fixture(FixtureKind::glass_front, p);
  const auto dir = testutil::scratch("acceptance_perf");
  const auto cloud_path = dir / "scene.ply";
  write_cloud(cloud_path, f.cloud, CloudFormat::ply_binary_le);

  std::vector<std::vector<std::filesystem::path>> outputs;
  double worst = 0.0;
  for (const char* run : {"run1", "run2"}) {
    PipelineConfig cfg;
    cfg.input = cloud_path;
    cfg.out_dir = dir / run;
    cfg.export_dims = {ExportDim::d0, ExportDim::d1, ExportDim::d2, ExportDim::d3};
    const auto t0 = std::chrono::steady_clock::now();
    const RunReport r = run_pipeline(cfg).report;
    worst = std::max(worst, seconds_since(t0));
    std::vector<std::filesystem::path> files;
    for (const auto& out : r.outputs) files.push_back(std::filesystem::path(out).filename());
    std::sort(files.begin(), files.end());
    outputs.push_back(files);
  }
  if (worst >= 10.0) o.fail("build took " + fmt("%.2f s", worst));
  if (outputs[0] != outputs[1] || outputs[0].empty()) o.fail("runs wrote different file sets");
  std::size_t differ = 0;
  for (const auto& name : outputs[0])
    if (testutil::read_file(dir / "run1" / name) != testutil::read_file(dir / "run2" / name)) ++differ;
  if (differ) o.fail(std::to_string(differ) + " exported files differ between runs");
  o.note(std::to_string(f.cloud.size()) + " points, 50x20x3 m, slowest build " + fmt("%.2f s", worst) + ", " +
         std::to_string(outputs[0].size()) + " exports byte-identical");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"hierarchy structure on two_rooms_door", hierarchy_structure},
      {"slanted ceiling volumes", slanted_ceiling},
      {"storey detection on two_storey", storey_detection},
      {"passage separation and contact clustering", passage_correctness},
      {"column and volume oracles", column_volume_oracles},
      {"alpha-shape oracle and corridor_T split", alpha_shape},
      {"mcc formula", mcc_formula},
      {"pipeline mcc on two_rooms_door and corridor_T", pipeline_mcc},
      {"seed threshold sweep", seed_threshold_sweep},
      {"performance and determinism", performance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
