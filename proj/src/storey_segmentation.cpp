#include "topomap/storey_segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "topomap/disjoint_set.hpp"
#include "topomap/error.hpp"

namespace topomap {

HeightHistogram build_z_histogram(const PointCloud& cloud, double bin_size) {
  if (!(bin_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "histogram bin size must be > 0");
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "cannot histogram an empty cloud");
  HeightHistogram h;
  h.bin_size = bin_size;
  h.z_min = cloud.bounds().min.z;
  const auto n = static_cast<std::size_t>(std::floor((cloud.bounds().max.z - h.z_min) / bin_size)) + 1;
  h.counts.assign(n, 0.0);
  for (const Vec3& p : cloud.points()) {
    auto i = static_cast<std::size_t>(std::floor((p.z - h.z_min) / bin_size));
    h.counts[std::min(i, n - 1)] += 1.0;
  }
  return h;
}

std::size_t window_half_bins(double c, double bin_size) {
  return static_cast<std::size_t>(std::floor(c / (2.0 * bin_size) + 1e-9));
}

std::vector<double> smooth(const HeightHistogram& hist, double c) {
  if (c < hist.bin_size * (1.0 - 1e-9))
    throw Error(ErrorCode::InvalidArgument, "window size must be >= histogram bin size");
  const std::size_t h = window_half_bins(c, hist.bin_size);
  const std::size_t n = hist.counts.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + hist.counts[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= h ? i - h : 0;
    const std::size_t hi = std::min(n - 1, i + h);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

double otsu_threshold(std::span<const double> signal) {
  if (signal.empty()) throw Error(ErrorCode::DegenerateSignal, "empty signal");
  const auto [lo_it, hi_it] = std::minmax_element(signal.begin(), signal.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateSignal, "signal has a single distinct value");
  constexpr int kLevels = 256;
  const double step = (hi - lo) / kLevels;
  std::array<double, kLevels> hist{};
  for (double v : signal) {
    const int level = std::min(kLevels - 1, static_cast<int>(std::floor((v - lo) / step)));
    hist[static_cast<std::size_t>(level)] += 1.0;
  }
  const double total = static_cast<double>(signal.size());
  double sum_all = 0.0;
  for (int l = 0; l < kLevels; ++l) sum_all += l * hist[static_cast<std::size_t>(l)];

  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_k = 0;
  for (int k = 0; k < kLevels - 1; ++k) {
    w0 += hist[static_cast<std::size_t>(k)];
    sum0 += k * hist[static_cast<std::size_t>(k)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0, mu1 = (sum_all - sum0) / w1;
    const double between = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_k = k;
    }
  }
  return lo + (best_k + 1) * step;
}

std::vector<PeakInterval> extract_peaks(const HeightHistogram& hist, std::span<const double> smoothed,
                                        double threshold) {
  std::vector<PeakInterval> peaks;
  const std::size_t n = smoothed.size();
  for (std::size_t i = 0; i < n;) {
    if (smoothed[i] < threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && smoothed[j + 1] >= threshold) ++j;
    peaks.push_back({i, j, hist.z_min + 0.5 * static_cast<double>(i + j + 1) * hist.bin_size});
    i = j + 1;
  }
  return peaks;
}

std::vector<PeakCandidateSet> detect_peaks(const HeightHistogram& hist, std::span<const double> window_sizes) {
  if (window_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no window sizes given");
  std::vector<PeakCandidateSet> out;
  for (double c : window_sizes) {
    const auto s = smooth(hist, c);
    double t = 0.0;
    try {
      t = otsu_threshold(s);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateSignal) continue;
      throw;
    }
    out.push_back({c, extract_peaks(hist, s, t)});
  }
  if (out.empty()) throw Error(ErrorCode::DegenerateSignal, "every window size produced a degenerate signal");
  return out;
}

namespace {

bool overlaps(const PeakInterval& a, const PeakInterval& b) {
  return a.start_bin <= b.end_bin && b.start_bin <= a.end_bin;
}

bool same_peaks(const PeakCandidateSet& a, const PeakCandidateSet& b) {
  if (a.peaks.size() != b.peaks.size()) return false;
  for (std::size_t i = 0; i < a.peaks.size(); ++i)
    if (!overlaps(a.peaks[i], b.peaks[i])) return false;
  return true;
}

}  // namespace

std::vector<double> select_peaks(std::span<const PeakCandidateSet> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::NoPeaks, "no peak candidate sets");
  std::vector<const PeakCandidateSet*> sets;
  for (const auto& c : candidates)
    if (!c.peaks.empty()) sets.push_back(&c);
  if (sets.empty()) throw Error(ErrorCode::NoPeaks, "no window size produced a peak");
  std::stable_sort(sets.begin(), sets.end(),
                   [](const auto* a, const auto* b) { return a->window_size < b->window_size; });

  DisjointSet ds(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      if (same_peaks(*sets[i], *sets[j])) ds.unite(i, j);

  // Groups come out ordered by their smallest member, i.e. smallest window, so
  // a strict comparison keeps the earlier group on ties.
  const auto clusters = groups(ds);
  const std::vector<std::size_t>* best = &clusters.front();
  for (const auto& g : clusters)
    if (g.size() > best->size()) best = &g;

  std::vector<double> centers;
  for (const auto& p : sets[best->front()]->peaks) centers.push_back(p.center_height);
  return centers;
}

std::vector<StoreyPart> label_and_split(const PointCloud& cloud, std::span<const double> peak_heights,
                                        double bin_size, double slab_margin) {
  std::vector<double> peaks(peak_heights.begin(), peak_heights.end());
  std::sort(peaks.begin(), peaks.end());
  if (peaks.size() < 2 || peaks.size() % 2 != 0) {
    std::ostringstream msg;
    msg << "cannot alternate floor/ceiling over " << peaks.size() << " peaks [";
    for (std::size_t i = 0; i < peaks.size(); ++i) msg << (i ? ", " : "") << peaks[i];
    msg << "]; supply an explicit peak list";
    throw Error(ErrorCode::Alternation, msg.str());
  }
  const std::size_t storeys = peaks.size() / 2;
  std::vector<StoreyPart> parts(storeys);
  std::vector<double> lo(storeys), hi(storeys);
  for (std::size_t k = 0; k < storeys; ++k) {
    parts[k].slab = {peaks[2 * k], peaks[2 * k + 1], static_cast<int>(k)};
    lo[k] = peaks[2 * k] - bin_size;
    hi[k] = peaks[2 * k + 1] + slab_margin;
    if (k + 1 < storeys) hi[k] = std::min(hi[k], peaks[2 * k + 2] - bin_size);
  }
  for (const Vec3& p : cloud.points()) {
    for (std::size_t k = 0; k < storeys; ++k) {
      if (p.z >= lo[k] && p.z < hi[k]) {
        parts[k].cloud.add(p);
        break;
      }
    }
  }
  return parts;
}

}  // namespace topomap
