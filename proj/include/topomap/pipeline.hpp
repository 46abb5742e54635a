#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "topomap/cloud_io.hpp"
#include "topomap/topomap.hpp"
#include "topomap/voxel_grid.hpp"

namespace topomap {

struct PipelineConfig {
  std::filesystem::path input;
  std::optional<CloudFormat> format;  // detected from the extension when unset
  double voxel = 0.15;
  double downsample = 0.05;  // <= 0 disables
  double denoise_link = 0.20;
  std::size_t denoise_min_points = 100;  // 0 disables
  bool denoise_first = false;            // default order: downsample, then denoise
  double bin_size = 0.01;
  std::vector<double> window_sizes{0.02, 0.04, 0.06, 0.08, 0.10};
  double slab_margin = 0.3;
  std::vector<double> peaks;  // explicit override; skips detection when non-empty
  double rel_tol = 0.10;
  std::optional<double> d_th;  // metres; 1.5 * voxel when unset
  double a_th = 20.0;
  double gate = 20.0;
  double alpha = 2.5;
  int prune_length = 4;
  double constriction_ratio = 0.9;
  double min_site_angle = 120.0;
  std::size_t memory_cap = kDefaultMemoryCap;
  std::vector<ExportDim> export_dims{ExportDim::d3};
  std::filesystem::path out_dir;  // empty: no export
  int threads = 1;

  double d_th_m() const { return d_th ? *d_th : 1.5 * voxel; }
  // Throws InvalidArgument naming the first offending key.
  void validate() const;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct StoreyCounts {
  int storey = 0;
  double floor = 0.0, ceiling = 0.0;
  std::size_t points = 0;
  std::size_t columns = 0;
  std::size_t volumes_grown = 0;  // before region subdivision
  std::size_t volumes = 0;
  std::size_t volume_passages = 0;
  std::size_t regions1 = 0;
  std::size_t region1_passages = 0;
  std::size_t leaves = 0;
  std::size_t subdivided = 0;
  std::size_t unlabeled_columns = 0;
  std::size_t unbounded_columns = 0;
  std::size_t grid_bytes = 0;
};

struct RunReport {
  std::size_t input_points = 0;
  std::size_t rejected_points = 0;
  std::size_t processed_points = 0;
  std::size_t denoise_removed_points = 0;
  std::size_t denoise_removed_clusters = 0;
  std::vector<double> peaks;
  std::vector<StoreyCounts> storeys;
  std::size_t nodes = 0, edges = 0;
  std::vector<StageTiming> timings;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> outputs;
  std::string failed_stage;  // empty on success
  std::string error;
};

struct PipelineResult {
  TopoMap map;
  RunReport report;
};

// Runs on an in-memory cloud (config.input is ignored). Exports when out_dir is
// set. Throws on failure after removing any files it wrote; the failing stage
// is recorded in the report passed in, when given.
PipelineResult run_pipeline(const PointCloud& cloud, const PipelineConfig& config, RunReport* failure = nullptr);

// Loads config.input first.
PipelineResult run_pipeline(const PipelineConfig& config, RunReport* failure = nullptr);

// Timings are omitted when with_timings is false, so reports can be compared.
std::string report_json(const RunReport& report, bool with_timings = true);

// INI-style key = value file; '#' or ';' start comments, [sections] are ignored.
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);
void apply_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

}  // namespace topomap
