#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace topomap {

// Row-major label raster; 0 is background.
struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> labels;

  LabelImage() = default;
  LabelImage(int w, int h) : width(w), height(h), labels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}
  std::uint32_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
  std::uint32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
  std::uint32_t max_label() const;

  friend bool operator==(const LabelImage&, const LabelImage&) = default;
};

// Binary PGM (P5); 8-bit when every label fits, 16-bit otherwise. Row 0 of
// the image is the first row in the file.
void write_pgm(const std::filesystem::path& path, const LabelImage& img);
// Reads P5 and P2 files.
LabelImage read_pgm(const std::filesystem::path& path);

struct Confusion {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Matthews correlation coefficient; 0 when any marginal sum is zero.
double mcc(double tp, double fp, double fn, double tn);
inline double mcc(const Confusion& c) { return mcc(double(c.tp), double(c.fp), double(c.fn), double(c.tn)); }

enum class MatchMode { max_overlap, one_to_one };
enum class Aggregate { pixel_weighted, mean };

MatchMode parse_match_mode(const std::string& s);
Aggregate parse_aggregate(const std::string& s);

// Segmented label -> ground-truth label (0 when the region lies entirely on
// background or, in one_to_one mode, lost every contest).
std::map<std::uint32_t, std::uint32_t> match_regions(const LabelImage& seg, const LabelImage& gt,
                                                     MatchMode mode = MatchMode::max_overlap);

struct RegionScore {
  std::uint32_t seg_label = 0;
  std::uint32_t gt_label = 0;
  Confusion counts;
  double mcc = 0.0;
  std::uint64_t weight = 0;  // pixels in the union of both regions
};

struct MccReport {
  std::vector<RegionScore> regions;  // ascending seg label
  double aggregate = 0.0;
  std::map<std::uint32_t, std::uint32_t> matching;
};

struct EvalOptions {
  MatchMode match = MatchMode::max_overlap;
  Aggregate aggregate = Aggregate::pixel_weighted;
};

MccReport evaluate(const LabelImage& seg, const LabelImage& gt, const EvalOptions& opts = {});

std::string report_json(const MccReport& r);
std::string report_table(const MccReport& r);

}  // namespace topomap
