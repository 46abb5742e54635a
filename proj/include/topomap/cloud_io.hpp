#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topomap/geometry.hpp"

namespace topomap {

// Raw metric points plus their cached axis-aligned bounds.
class PointCloud {
public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> points);

  void add(Vec3 p);
  void reserve(std::size_t n) { points_.reserve(n); }

  std::span<const Vec3> points() const { return points_; }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // Undefined for an empty cloud.
  const Box3& bounds() const { return bounds_; }

  friend bool operator==(const PointCloud& a, const PointCloud& b) { return a.points_ == b.points_; }

private:
  std::vector<Vec3> points_;
  Box3 bounds_{};
};

enum class CloudFormat { ply_ascii, ply_binary_le, pcd_ascii, xyz_text };

std::optional<CloudFormat> parse_cloud_format(const std::string& name);
const char* to_string(CloudFormat format);

// Guesses the format from the extension; for .ply the header is inspected.
CloudFormat detect_cloud_format(const std::filesystem::path& path);

struct LoadResult {
  PointCloud cloud;
  std::size_t rejected = 0;  // points with a non-finite coordinate
};

LoadResult load_cloud(const std::filesystem::path& path, CloudFormat format);
LoadResult load_cloud(const std::filesystem::path& path);

// ASCII writers use `precision` digits after the decimal point.
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format,
                 int precision = 6);

// One centroid per occupied cell of the lattice anchored at the cloud's min
// corner. Output order follows the cell key (x-major), so it is independent of
// input order.
PointCloud voxel_downsample(const PointCloud& cloud, double cell);

// Same, with an explicit lattice anchor.
PointCloud voxel_downsample(const PointCloud& cloud, double cell, Vec3 anchor);

struct DenoiseResult {
  PointCloud cloud;
  std::size_t removed_points = 0;
  std::size_t removed_clusters = 0;
  std::size_t kept_clusters = 0;
};

// Single-linkage clustering under dist <= link_dist; clusters smaller than
// min_points are dropped. Surviving points keep their input order.
DenoiseResult denoise_clusters(const PointCloud& cloud, double link_dist, std::size_t min_points);

// Cluster labels for every point (label = index of the cluster, clusters
// ordered by their first point).
std::vector<std::size_t> euclidean_cluster_labels(std::span<const Vec3> points, double link_dist);

}  // namespace topomap
