#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topomap/error.hpp"
#include "topomap/evaluation.hpp"
#include "topomap/fixtures.hpp"
#include "topomap/pipeline.hpp"
#include "topomap/topomap.hpp"

namespace {

using namespace topomap;

constexpr int kOk = 0, kUsage = 1, kInput = 2, kPipeline = 3;

bool is_input_error(ErrorCode c) {
  return c == ErrorCode::Parse || c == ErrorCode::Io || c == ErrorCode::InvalidArgument ||
         c == ErrorCode::DimensionMismatch;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  out << text;
}

int cmd_build(const std::string& config_file, const std::map<std::string, std::string>& flags,
              const std::vector<std::string>& sets, const std::string& report_path) {
  PipelineConfig cfg;
  try {
    if (!config_file.empty()) apply_config_file(cfg, config_file);
    for (const auto& [k, v] : flags) apply_config_value(cfg, k, v);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--set expects key=value, got '" + kv + "'");
      apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  RunReport failure;
  try {
    PipelineResult r = run_pipeline(cfg, &failure);
    const std::string json = report_json(r.report);
    if (!report_path.empty()) write_text(report_path, json);
    else if (!cfg.out_dir.empty()) write_text(cfg.out_dir / "report.json", json);
    else std::cout << json;
    for (const std::string& w : r.report.warnings) std::cerr << "warning: " << w << "\n";
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!report_path.empty()) {
      try {
        write_text(report_path, report_json(failure));
      } catch (const Error&) {
      }
    }
    return failure.failed_stage == "load" || failure.failed_stage == "config" ? kInput : kPipeline;
  }
}

int cmd_eval(const std::string& seg_path, const std::string& gt_path, const std::string& match,
             const std::string& aggregate, bool json) {
  try {
    EvalOptions opts;
    opts.match = parse_match_mode(match);
    opts.aggregate = parse_aggregate(aggregate);
    const LabelImage seg = read_pgm(seg_path);
    const LabelImage gt = read_pgm(gt_path);
    const MccReport r = evaluate(seg, gt, opts);
    std::cout << (json ? report_json(r) : report_table(r));
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kInput : kPipeline;
  }
}

int cmd_fixture(const std::string& kind_name, const FixtureParams& params, const std::string& out_dir,
                double voxel) {
  const auto kind = parse_fixture_kind(kind_name);
  if (!kind) {
    std::cerr << "error: unknown fixture kind '" << kind_name << "'\n";
    return kUsage;
  }
  try {
    const Fixture f = make_fixture(*kind, params);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_cloud(dir / "cloud.ply", f.cloud, CloudFormat::ply_binary_le);
    write_text(dir / "truth.json", truth_json(f.truth));
    write_pgm(dir / "gt.pgm", render_truth(f.truth, planar_grid_for(f.cloud, voxel)));
    std::cout << "wrote " << f.cloud.size() << " points to " << (dir / "cloud.ply").string() << "\n";
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kInput : kPipeline;
  }
}

int cmd_inspect(const std::string& path) {
  try {
    const TopoMap map = import_map(path);
    std::map<std::string, int> kinds;
    for (const MapNode& n : map.nodes) ++kinds[to_string(n.level) + "/" + n.kind];
    std::map<std::string, int> edge_levels;
    for (const MapEdge& e : map.edges) ++edge_levels[to_string(e.level)];
    std::printf("format_version %d\nstoreys %zu\nnodes %zu\nedges %zu\n", map.format_version, map.storeys.size(),
                map.nodes.size(), map.edges.size());
    for (const StoreyInfo& s : map.storeys)
      std::printf("storey floor %.3f ceiling %.3f columns %zu\n", s.slab.floor_height, s.slab.ceiling_height,
                  s.field.size());
    for (const auto& [k, n] : kinds) std::printf("nodes %s %d\n", k.c_str(), n);
    for (const auto& [k, n] : edge_levels) std::printf("edges %s %d\n", k.c_str(), n);
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kInput : kPipeline;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical topometric maps from indoor point clouds"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "run the mapping pipeline on a point cloud");
  std::string config_file, report_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  struct FlagSpec {
    const char* name;
    const char* help;
  };
  const FlagSpec specs[] = {
      {"input", "point cloud (.ply, .pcd, .xyz)"},
      {"format", "ply_ascii, ply_binary_le, pcd_ascii or xyz_text"},
      {"out_dir", "output directory"},
      {"export", "comma-separated export levels d0..d3"},
      {"voxel", "voxel size in metres"},
      {"downsample", "downsampling cell in metres, 0 disables"},
      {"denoise_link", "cluster link distance in metres"},
      {"denoise_min_points", "minimum cluster size, 0 disables"},
      {"denoise_first", "denoise before downsampling"},
      {"bin_size", "height histogram bin in metres"},
      {"window_sizes", "comma-separated smoothing windows in metres"},
      {"slab_margin", "storey slab margin in metres"},
      {"peaks", "comma-separated peak heights, skips detection"},
      {"rel_tol", "volume growth tolerance"},
      {"d_th", "passage clustering distance in metres"},
      {"a_th", "seed volume threshold in cubic metres"},
      {"gate", "subdivision gate in cubic metres"},
      {"alpha", "alpha-shape diameter in metres"},
      {"prune_length", "skeleton spur length in cells"},
      {"constriction_ratio", "constriction cut ratio"},
      {"min_site_angle", "Voronoi site angle in degrees"},
      {"memory_cap", "occupancy grid memory cap in bytes"},
      {"threads", "worker cap"},
  };
  std::map<std::string, std::string> raw;
  for (const FlagSpec& s : specs) build->add_option(std::string("--") + s.name, raw[s.name], s.help);
  build->add_option("-c,--config", config_file, "key = value config file")->check(CLI::ExistingFile);
  build->add_option("--set", sets, "key=value override, repeatable");
  build->add_option("--report", report_path, "write the run report here");

  auto* eval = app.add_subcommand("eval", "score a label image against ground truth");
  std::string seg_path, gt_path, match = "max_overlap", aggregate = "pixel_weighted";
  bool json = false;
  eval->add_option("seg", seg_path, "segmentation PGM")->required();
  eval->add_option("gt", gt_path, "ground truth PGM")->required();
  eval->add_option("--match", match, "max_overlap or one_to_one");
  eval->add_option("--aggregate", aggregate, "pixel_weighted or mean");
  eval->add_flag("--json", json, "JSON output");

  auto* fixture = app.add_subcommand("fixture", "generate a synthetic scene with ground truth");
  std::string kind, out_dir = ".";
  double gt_voxel = 0.15;
  FixtureParams fp;
  fixture->add_option("kind", kind, "two_rooms_door, slanted_ceiling, two_storey, corridor_T, table_room, glass_front")
      ->required();
  fixture->add_option("-o,--out", out_dir, "output directory");
  fixture->add_option("--voxel", gt_voxel, "ground truth image cell size");
  fixture->add_option("--density", fp.density, "surface points per square metre")->check(CLI::PositiveNumber);
  fixture->add_option("--seed", fp.seed, "random seed");
  fixture->add_option("--height", fp.height, "storey height")->check(CLI::PositiveNumber);
  fixture->add_option("--room-size", fp.room_size, "room edge length")->check(CLI::PositiveNumber);
  fixture->add_option("--door-width", fp.door_width, "door width")->check(CLI::PositiveNumber);
  fixture->add_option("--door-height", fp.door_height, "door height")->check(CLI::PositiveNumber);
  fixture->add_option("--slope", fp.slope, "ceiling slope");
  fixture->add_option("--step", fp.step, "relative ceiling drop");
  fixture->add_option("--slab", fp.slab, "slab thickness")->check(CLI::PositiveNumber);
  fixture->add_option("--rooms-per-side", fp.rooms_per_side, "rooms on each corridor side")
      ->check(CLI::PositiveNumber);
  fixture->add_option("--room-width", fp.room_width, "room width along the corridor")->check(CLI::PositiveNumber);
  fixture->add_option("--room-depth", fp.room_depth, "room depth")->check(CLI::PositiveNumber);
  fixture->add_option("--corridor-width", fp.corridor_width, "corridor width")->check(CLI::PositiveNumber);
  fixture->add_option("--front-opening", fp.front_opening, "opening width in each glass front")->check(CLI::PositiveNumber);

  auto* inspect = app.add_subcommand("inspect", "summarize an exported d3 map");
  std::string map_path;
  inspect->add_option("map", map_path, "map_d3.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*build) {
    for (const FlagSpec& s : specs)
      if (build->count(std::string("--") + s.name) > 0) flags[s.name] = raw[s.name];
    return cmd_build(config_file, flags, sets, report_path);
  }
  if (*eval) return cmd_eval(seg_path, gt_path, match, aggregate, json);
  if (*fixture) return cmd_fixture(kind, fp, out_dir, gt_voxel);
  if (*inspect) return cmd_inspect(map_path);
  return kUsage;
}
