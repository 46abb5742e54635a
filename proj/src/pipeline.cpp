#include "topomap/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "topomap/columns.hpp"
#include "topomap/error.hpp"
#include "topomap/passages.hpp"
#include "topomap/regions.hpp"
#include "topomap/storey_segmentation.hpp"
#include "topomap/subdivide.hpp"
#include "topomap/volumes.hpp"

namespace topomap {

void PipelineConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be a positive number");
  };
  positive(voxel, "voxel");
  positive(denoise_link, "denoise_link");
  positive(bin_size, "bin_size");
  positive(rel_tol, "rel_tol");
  positive(d_th_m(), "d_th");
  positive(a_th, "a_th");
  positive(gate, "gate");
  positive(alpha, "alpha");
  positive(slab_margin, "slab_margin");
  positive(constriction_ratio, "constriction_ratio");
  positive(min_site_angle, "min_site_angle");
  if (downsample < 0.0 || !std::isfinite(downsample))
    throw Error(ErrorCode::InvalidArgument, "downsample must be >= 0");
  if (window_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "window_sizes must not be empty");
  for (double w : window_sizes)
    if (!(w >= bin_size)) throw Error(ErrorCode::InvalidArgument, "window_sizes must be >= bin_size");
  if (prune_length < 0) throw Error(ErrorCode::InvalidArgument, "prune_length must be >= 0");
  if (memory_cap == 0) throw Error(ErrorCode::InvalidArgument, "memory_cap must be > 0");
  if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
}

namespace {

class StageRunner {
public:
  explicit StageRunner(RunReport& report) : report_(report) {}

  template <class Fn>
  auto operator()(const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(name, t0);
      } else {
        auto r = fn();
        record(name, t0);
        return r;
      }
    } catch (const Error& e) {
      report_.failed_stage = name;
      report_.error = e.what();
      throw Error(e.code(), name + ": " + e.what());
    } catch (const std::exception& e) {
      report_.failed_stage = name;
      report_.error = e.what();
      throw Error(ErrorCode::Internal, name + ": " + e.what());
    }
  }

private:
  void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    report_.timings.push_back({name, dt.count()});
  }
  RunReport& report_;
};

void remove_outputs(const std::vector<std::filesystem::path>& paths) {
  std::error_code ec;
  for (const auto& p : paths) std::filesystem::remove(p, ec);
}

}  // namespace

PipelineResult run_pipeline(const PointCloud& input, const PipelineConfig& cfg, RunReport* failure) {
  PipelineResult result;
  RunReport& rep = result.report;
  StageRunner stage(rep);
  std::vector<std::filesystem::path> written;
  try {
    stage("config", [&] { cfg.validate(); });
    if (input.empty()) throw Error(ErrorCode::EmptyCloud, "input cloud is empty");
    rep.input_points += input.size();

    PointCloud cloud = stage("preprocess", [&] {
      PointCloud c = input;
      auto denoise = [&] {
        if (cfg.denoise_min_points == 0) return;
        DenoiseResult d = denoise_clusters(c, cfg.denoise_link, cfg.denoise_min_points);
        rep.denoise_removed_points = d.removed_points;
        rep.denoise_removed_clusters = d.removed_clusters;
        c = std::move(d.cloud);
      };
      if (cfg.denoise_first) denoise();
      if (cfg.downsample > 0.0) c = voxel_downsample(c, cfg.downsample);
      if (!cfg.denoise_first) denoise();
      if (c.empty()) throw Error(ErrorCode::EmptyCloud, "no points left after preprocessing");
      return c;
    });
    rep.processed_points = cloud.size();
    if (rep.denoise_removed_points > 0)
      rep.warnings.push_back("denoise removed " + std::to_string(rep.denoise_removed_points) + " points in " +
                             std::to_string(rep.denoise_removed_clusters) + " clusters");

    rep.peaks = stage("storeys", [&] {
      if (!cfg.peaks.empty()) return cfg.peaks;
      HeightHistogram hist = build_z_histogram(input, cfg.bin_size);
      std::vector<PeakCandidateSet> sets = detect_peaks(hist, cfg.window_sizes);
      return select_peaks(sets);
    });
    std::vector<StoreyPart> parts =
        stage("split", [&] { return label_and_split(cloud, rep.peaks, cfg.bin_size, cfg.slab_margin); });

    std::vector<StoreyBuild> builds;
    for (std::size_t s = 0; s < parts.size(); ++s) {
      const StoreyPart& part = parts[s];
      const std::string tag = "storey " + std::to_string(s) + " ";
      StoreyCounts counts;
      counts.storey = static_cast<int>(s);
      counts.floor = part.slab.floor_height;
      counts.ceiling = part.slab.ceiling_height;
      counts.points = part.cloud.size();
      if (part.cloud.empty()) throw Error(ErrorCode::EmptyCloud, tag + "has no points");

      OccupancyGrid grid =
          stage(tag + "grid", [&] { return rasterize(part.cloud, part.slab, cfg.voxel, cfg.memory_cap); });
      counts.grid_bytes = grid.memory_bytes();
      ColumnStats cstats;
      ColumnField field = stage(tag + "columns", [&] { return extract_columns(grid, &cstats); });
      counts.columns = field.size();
      counts.unbounded_columns = cstats.pruned_unbounded;
      if (cstats.pruned_unbounded > 0)
        rep.warnings.push_back(tag + "deleted " + std::to_string(cstats.pruned_unbounded) + " unbounded columns");
      if (field.size() == 0) throw Error(ErrorCode::EmptyCloud, tag + "has no free columns");

      VolumeSet volumes = stage(tag + "volumes", [&] { return grow_volumes(field, cfg.rel_tol); });
      VolumeGraph vgraph = stage(tag + "passages", [&] {
        return generate_passages(field, volumes.volume_of, volumes.volumes.size(), cfg.d_th_m());
      });
      const double d_lat = cfg.d_th_m() / cfg.voxel;
      RegionGraph rg = stage(tag + "regions", [&] {
        return generate_regions(vgraph, volumes.volumes, cfg.a_th, d_lat, static_cast<int>(s));
      });
      SubdivisionParams sp;
      sp.gate_m3 = cfg.gate;
      sp.d_th = cfg.d_th_m();
      sp.segment.alpha = cfg.alpha;
      sp.segment.voronoi.min_site_angle_deg = cfg.min_site_angle;
      sp.segment.area.prune_length = cfg.prune_length;
      sp.segment.area.constriction_ratio = cfg.constriction_ratio;
      StoreyHierarchy h = stage(tag + "subdivide", [&] { return subdivide_regions(field, volumes, rg, sp); });

      counts.volumes_grown = volumes.volumes.size();
      counts.volumes = h.volumes.volumes.size();
      counts.volume_passages = h.volume_graph.edges.size();
      counts.regions1 = h.regions1.size();
      counts.region1_passages = h.region1_edges.size();
      counts.leaves = h.leaves.size();
      counts.subdivided = h.subdivided.size();
      counts.unlabeled_columns = h.unlabeled_columns;
      for (const std::string& w : h.warnings) rep.warnings.push_back(tag + w);
      if (h.unlabeled_columns > 0)
        rep.warnings.push_back(tag + std::to_string(h.unlabeled_columns) +
                               " columns had no 2D area label and took the nearest one");
      rep.storeys.push_back(counts);
      builds.push_back({part.slab, std::move(field), std::move(h)});
    }

    result.map = stage("assemble", [&] { return assemble(builds); });
    rep.nodes = result.map.nodes.size();
    rep.edges = result.map.edges.size();

    if (!cfg.out_dir.empty()) {
      stage("export", [&] {
        std::filesystem::create_directories(cfg.out_dir);
        for (ExportDim d : cfg.export_dims) {
          // Record each path as it appears so a failure midway can clean up.
          std::vector<std::filesystem::path> files = export_map(result.map, d, cfg.out_dir);
          written.insert(written.end(), files.begin(), files.end());
        }
      });
      rep.outputs = written;
    }
  } catch (...) {
    remove_outputs(written);
    if (failure) *failure = rep;
    throw;
  }
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, RunReport* failure) {
  RunReport rep;
  LoadResult loaded;
  try {
    if (cfg.input.empty()) throw Error(ErrorCode::InvalidArgument, "no input path given");
    loaded = cfg.format ? load_cloud(cfg.input, *cfg.format) : load_cloud(cfg.input);
  } catch (const Error& e) {
    rep.failed_stage = "load";
    rep.error = e.what();
    if (failure) *failure = rep;
    throw Error(e.code(), std::string("load: ") + e.what());
  }
  PipelineResult r = run_pipeline(loaded.cloud, cfg, failure);
  r.report.rejected_points = loaded.rejected;
  if (loaded.rejected > 0)
    r.report.warnings.insert(r.report.warnings.begin(),
                             "rejected " + std::to_string(loaded.rejected) + " points with non-finite coordinates");
  return r;
}

std::string report_json(const RunReport& r, bool with_timings) {
  nlohmann::ordered_json j;
  j["status"] = r.failed_stage.empty() ? "ok" : "error";
  if (!r.failed_stage.empty()) {
    j["failed_stage"] = r.failed_stage;
    j["error"] = r.error;
  }
  j["input_points"] = r.input_points;
  j["rejected_points"] = r.rejected_points;
  j["processed_points"] = r.processed_points;
  j["denoise_removed_points"] = r.denoise_removed_points;
  j["denoise_removed_clusters"] = r.denoise_removed_clusters;
  j["peaks"] = r.peaks;
  j["storeys"] = nlohmann::ordered_json::array();
  std::size_t columns = 0, volumes = 0, regions = 0, region_edges = 0, passages = 0;
  for (const StoreyCounts& s : r.storeys) {
    columns += s.columns;
    volumes += s.volumes;
    regions += s.regions1;
    region_edges += s.region1_passages;
    passages += s.volume_passages;
    j["storeys"].push_back({{"storey", s.storey},
                            {"floor", s.floor},
                            {"ceiling", s.ceiling},
                            {"points", s.points},
                            {"grid_bytes", s.grid_bytes},
                            {"columns", s.columns},
                            {"unbounded_columns", s.unbounded_columns},
                            {"volumes_grown", s.volumes_grown},
                            {"volumes", s.volumes},
                            {"volume_passages", s.volume_passages},
                            {"regions", s.regions1},
                            {"region_edges", s.region1_passages},
                            {"leaf_regions", s.leaves},
                            {"subdivided_regions", s.subdivided},
                            {"unlabeled_columns", s.unlabeled_columns}});
  }
  j["counts"] = {{"columns", columns},       {"volumes", volumes},   {"volume_passages", passages},
                 {"regions", regions},       {"region_edges", region_edges},
                 {"nodes", r.nodes},         {"edges", r.edges}};
  if (with_timings) {
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    double total = 0.0;
    for (const StageTiming& s : r.timings) {
      t[s.stage] = s.seconds;
      total += s.seconds;
    }
    t["total"] = total;
    j["timings_s"] = t;
  }
  j["warnings"] = r.warnings;
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& p : r.outputs) j["outputs"].push_back(p.generic_string());
  return j.dump(2) + "\n";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(v.substr(used)).size() != 0)
    throw Error(ErrorCode::InvalidArgument, key + ": not a number: '" + v + "'");
  return d;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::InvalidArgument, key + ": not a boolean: '" + v + "'");
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d)) throw Error(ErrorCode::InvalidArgument, key + ": not a count: '" + v + "'");
  return static_cast<std::size_t>(d);
}

}  // namespace

void apply_config_value(PipelineConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key), v = trim(raw_value);
  if (key == "input") c.input = v;
  else if (key == "format") {
    auto f = parse_cloud_format(v);
    if (!f) throw Error(ErrorCode::InvalidArgument, "format: unknown cloud format '" + v + "'");
    c.format = f;
  } else if (key == "voxel") c.voxel = to_double(key, v);
  else if (key == "downsample") c.downsample = to_double(key, v);
  else if (key == "denoise_link") c.denoise_link = to_double(key, v);
  else if (key == "denoise_min_points") c.denoise_min_points = to_count(key, v);
  else if (key == "denoise_first") c.denoise_first = to_bool(key, v);
  else if (key == "bin_size") c.bin_size = to_double(key, v);
  else if (key == "window_sizes") c.window_sizes = to_list(key, v);
  else if (key == "slab_margin") c.slab_margin = to_double(key, v);
  else if (key == "peaks") c.peaks = to_list(key, v);
  else if (key == "rel_tol") c.rel_tol = to_double(key, v);
  else if (key == "d_th") c.d_th = to_double(key, v);
  else if (key == "a_th") c.a_th = to_double(key, v);
  else if (key == "gate") c.gate = to_double(key, v);
  else if (key == "alpha") c.alpha = to_double(key, v);
  else if (key == "prune_length") c.prune_length = static_cast<int>(to_count(key, v));
  else if (key == "constriction_ratio") c.constriction_ratio = to_double(key, v);
  else if (key == "min_site_angle") c.min_site_angle = to_double(key, v);
  else if (key == "memory_cap") c.memory_cap = to_count(key, v);
  else if (key == "threads") c.threads = static_cast<int>(to_count(key, v));
  else if (key == "out_dir") c.out_dir = v;
  else if (key == "export") {
    c.export_dims.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) c.export_dims.push_back(parse_export_dim(trim(item)));
  } else
    throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
}

void apply_config_file(PipelineConfig& c, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      apply_config_value(c, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace topomap
