#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "topomap/cloud_io.hpp"

namespace topomap {

// Bin i covers [z_min + i*bin_size, z_min + (i+1)*bin_size).
struct HeightHistogram {
  double bin_size = 0.01;
  double z_min = 0.0;
  std::vector<double> counts;

  double bin_center(std::size_t i) const { return z_min + (static_cast<double>(i) + 0.5) * bin_size; }
};

struct PeakInterval {
  std::size_t start_bin = 0;
  std::size_t end_bin = 0;  // inclusive
  double center_height = 0.0;
};

struct PeakCandidateSet {
  double window_size = 0.0;
  std::vector<PeakInterval> peaks;  // disjoint, sorted by start_bin
};

struct StoreySlab {
  double floor_height = 0.0;
  double ceiling_height = 0.0;
  int index = 0;

  friend bool operator==(const StoreySlab&, const StoreySlab&) = default;
};

HeightHistogram build_z_histogram(const PointCloud& cloud, double bin_size);

// Half-support in bins of the box filter for a window size c.
std::size_t window_half_bins(double c, double bin_size);

// Box filter: mean over bins with |z - z_i| <= c/2, renormalized at borders.
std::vector<double> smooth(const HeightHistogram& hist, double c);

// Otsu over a 256-level quantization of [min, max] of the signal. Values at or
// above the returned threshold form the upper class.
double otsu_threshold(std::span<const double> signal);

// Maximal runs with signal >= threshold.
std::vector<PeakInterval> extract_peaks(const HeightHistogram& hist, std::span<const double> smoothed,
                                        double threshold);

// Window sizes whose signal is degenerate are dropped; if all drop, throws.
std::vector<PeakCandidateSet> detect_peaks(const HeightHistogram& hist, std::span<const double> window_sizes);

// Groups window sizes with equal peak counts and pairwise overlapping peaks,
// takes the largest group (ties: the group holding the smallest window) and
// returns the peak centers of its smallest window.
std::vector<double> select_peaks(std::span<const PeakCandidateSet> candidates);

struct StoreyPart {
  StoreySlab slab;
  PointCloud cloud;
};

// Peak 2k is the floor and 2k+1 the ceiling of storey k. Storey k takes
// z in [floor_k - bin_size, min(ceiling_k + slab_margin, floor_{k+1} - bin_size)).
std::vector<StoreyPart> label_and_split(const PointCloud& cloud, std::span<const double> peak_heights,
                                        double bin_size, double slab_margin);

}  // namespace topomap
