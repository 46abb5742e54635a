#include "topomap/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "topomap/error.hpp"

namespace topomap {

std::uint32_t LabelImage::max_label() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

void write_pgm(const std::filesystem::path& path, const LabelImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  const std::uint32_t maxv = img.max_label();
  if (maxv > 65535) throw Error(ErrorCode::InvalidArgument, "label exceeds 16 bits: " + path.string());
  const bool wide = maxv > 255;
  out << "P5\n" << img.width << ' ' << img.height << '\n' << (wide ? 65535 : 255) << '\n';
  std::string buf;
  buf.reserve(img.labels.size() * (wide ? 2 : 1));
  for (std::uint32_t l : img.labels) {
    if (wide) buf.push_back(static_cast<char>(l >> 8));
    buf.push_back(static_cast<char>(l & 0xff));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

namespace {

// Next header token, skipping whitespace and comments.
std::string pgm_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw ParseError("truncated PGM header in " + path, static_cast<std::size_t>(std::max<std::streamoff>(0, in.tellg())));
  return tok;
}

int pgm_int(std::istream& in, const std::string& path) {
  const auto pos = in.tellg();
  const std::string t = pgm_token(in, path);
  try {
    std::size_t used = 0;
    const int v = std::stoi(t, &used);
    if (used != t.size() || v < 0) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad PGM header value '" + t + "' in " + path, static_cast<std::size_t>(std::max<std::streamoff>(0, pos)));
  }
}

}  // namespace

LabelImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const std::string p = path.string();
  const std::string magic = pgm_token(in, p);
  if (magic != "P5" && magic != "P2") throw ParseError("not a PGM file: " + p, 0);
  const int w = pgm_int(in, p), h = pgm_int(in, p), maxv = pgm_int(in, p);
  if (maxv <= 0 || maxv > 65535) throw ParseError("bad PGM maxval in " + p, static_cast<std::size_t>(in.tellg()));
  LabelImage img(w, h);
  if (magic == "P2") {
    for (auto& l : img.labels) l = static_cast<std::uint32_t>(pgm_int(in, p));
    return img;
  }
  const bool wide = maxv > 255;
  std::vector<unsigned char> buf(img.labels.size() * (wide ? 2 : 1));
  const auto start = in.tellg();
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw ParseError("truncated PGM raster in " + p, static_cast<std::size_t>(start) + static_cast<std::size_t>(in.gcount()));
  for (std::size_t i = 0; i < img.labels.size(); ++i)
    img.labels[i] = wide ? (std::uint32_t{buf[2 * i]} << 8 | buf[2 * i + 1]) : buf[i];
  return img;
}

double mcc(double tp, double fp, double fn, double tn) {
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(den);
}

MatchMode parse_match_mode(const std::string& s) {
  if (s == "max_overlap") return MatchMode::max_overlap;
  if (s == "one_to_one") return MatchMode::one_to_one;
  throw Error(ErrorCode::InvalidArgument, "unknown match mode: " + s);
}

Aggregate parse_aggregate(const std::string& s) {
  if (s == "pixel_weighted") return Aggregate::pixel_weighted;
  if (s == "mean") return Aggregate::mean;
  throw Error(ErrorCode::InvalidArgument, "unknown aggregate: " + s);
}

namespace {

void check_dims(const LabelImage& seg, const LabelImage& gt) {
  if (seg.width != gt.width || seg.height != gt.height) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "image size mismatch: %dx%d vs %dx%d", seg.width, seg.height, gt.width, gt.height);
    throw Error(ErrorCode::DimensionMismatch, buf);
  }
}

}  // namespace

std::map<std::uint32_t, std::uint32_t> match_regions(const LabelImage& seg, const LabelImage& gt, MatchMode mode) {
  check_dims(seg, gt);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> overlap;
  std::map<std::uint32_t, std::uint32_t> out;
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    const std::uint32_t s = seg.labels[i];
    if (!s) continue;
    out.emplace(s, 0);
    if (gt.labels[i]) ++overlap[{s, gt.labels[i]}];
  }
  if (mode == MatchMode::max_overlap) {
    std::map<std::uint32_t, std::uint64_t> best;
    for (const auto& [key, n] : overlap) {
      // Keys ascend by gt label, so a strict comparison keeps the smaller one on ties.
      auto it = best.find(key.first);
      if (it == best.end() || n > it->second) {
        best[key.first] = n;
        out[key.first] = key.second;
      }
    }
    return out;
  }
  // Greedy one-to-one: largest overlaps first, smaller labels on ties.
  std::vector<std::tuple<std::uint64_t, std::uint32_t, std::uint32_t>> pairs;
  for (const auto& [key, n] : overlap) pairs.emplace_back(n, key.first, key.second);
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_pair(std::get<1>(a), std::get<2>(a)) < std::make_pair(std::get<1>(b), std::get<2>(b));
  });
  std::map<std::uint32_t, bool> gt_used;
  for (const auto& [n, s, g] : pairs) {
    if (out[s] != 0 || gt_used[g]) continue;
    out[s] = g;
    gt_used[g] = true;
  }
  return out;
}

MccReport evaluate(const LabelImage& seg, const LabelImage& gt, const EvalOptions& opts) {
  MccReport rep;
  rep.matching = match_regions(seg, gt, opts.match);
  std::map<std::uint32_t, std::uint64_t> seg_size, gt_size;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> overlap;
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    if (seg.labels[i]) ++seg_size[seg.labels[i]];
    if (gt.labels[i]) ++gt_size[gt.labels[i]];
    if (seg.labels[i] && gt.labels[i]) ++overlap[{seg.labels[i], gt.labels[i]}];
  }
  const std::uint64_t total = seg.labels.size();
  double wsum = 0.0, acc = 0.0;
  for (const auto& [s, g] : rep.matching) {
    RegionScore sc;
    sc.seg_label = s;
    sc.gt_label = g;
    const std::uint64_t ns = seg_size[s];
    const std::uint64_t ng = g ? gt_size[g] : 0;
    const std::uint64_t tp = g ? overlap[{s, g}] : 0;
    sc.counts = Confusion{tp, ns - tp, ng - tp, total - ns - ng + tp};
    sc.mcc = mcc(sc.counts);
    sc.weight = ns + ng - tp;
    const double w = opts.aggregate == Aggregate::pixel_weighted ? static_cast<double>(sc.weight) : 1.0;
    wsum += w;
    acc += w * sc.mcc;
    rep.regions.push_back(sc);
  }
  rep.aggregate = wsum > 0.0 ? acc / wsum : 0.0;
  return rep;
}

std::string report_json(const MccReport& r) {
  nlohmann::ordered_json j;
  j["aggregate_mcc"] = r.aggregate;
  j["regions"] = nlohmann::ordered_json::array();
  for (const RegionScore& s : r.regions) {
    j["regions"].push_back({{"seg_label", s.seg_label},
                            {"gt_label", s.gt_label},
                            {"tp", s.counts.tp},
                            {"fp", s.counts.fp},
                            {"fn", s.counts.fn},
                            {"tn", s.counts.tn},
                            {"mcc", s.mcc},
                            {"weight", s.weight}});
  }
  return j.dump(2) + "\n";
}

std::string report_table(const MccReport& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%8s %8s %10s %10s %10s %12s %9s\n", "seg", "gt", "tp", "fp", "fn", "tn", "mcc");
  os << line;
  for (const RegionScore& s : r.regions) {
    std::snprintf(line, sizeof line, "%8u %8u %10llu %10llu %10llu %12llu %9.5f\n", s.seg_label, s.gt_label,
                  static_cast<unsigned long long>(s.counts.tp), static_cast<unsigned long long>(s.counts.fp),
                  static_cast<unsigned long long>(s.counts.fn), static_cast<unsigned long long>(s.counts.tn), s.mcc);
    os << line;
  }
  std::snprintf(line, sizeof line, "aggregate mcc: %.6f\n", r.aggregate);
  os << line;
  return os.str();
}

}  // namespace topomap
