#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "topomap/error.hpp"
#include "topomap/evaluation.hpp"

using namespace topomap;

namespace {

double mcc_formula(double tp, double fp, double fn, double tn) {
  const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  return den == 0.0 ? 0.0 : (tp * tn - fp * fn) / den;
}

LabelImage image(int w, int h, std::vector<std::uint32_t> px) {
  LabelImage img(w, h);
  img.labels = std::move(px);
  return img;
}

}  // namespace

TEST_CASE("mcc formula values") {
  CHECK(mcc(2, 1, 1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(mcc(10, 0, 0, 90) == 1.0);
  CHECK(mcc(0, 10, 90, 0) == -1.0);
  CHECK(mcc(0, 0, 0, 5) == 0.0);
}

TEST_CASE("mcc symmetry under class swap, antisymmetry under prediction flip") {
  std::mt19937 rng(4);
  for (int k = 0; k < 100; ++k) {
    const double tp = rng() % 1000, fp = rng() % 1000, fn = rng() % 1000, tn = rng() % 1000;
    const double m = mcc(tp, fp, fn, tn);
    CHECK(std::abs(m - mcc_formula(tp, fp, fn, tn)) <= 1e-12);
    CHECK(std::abs(mcc(tn, fn, fp, tp) - m) <= 1e-12);
    CHECK(std::abs(mcc(fn, tn, tp, fp) + m) <= 1e-12);
  }
}

TEST_CASE("perfect segmentation scores 1 under any relabelling") {
  const LabelImage gt = image(4, 2, {1, 1, 2, 2, 0, 3, 3, 3});
  const LabelImage seg = image(4, 2, {7, 7, 5, 5, 0, 9, 9, 9});
  const MccReport r = evaluate(seg, gt);
  CHECK(r.aggregate == 1.0);
  CHECK(r.matching.at(7) == 1);
  CHECK(r.matching.at(5) == 2);
  CHECK(r.matching.at(9) == 3);
}

TEST_CASE("per-region counts equal a pixel loop") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 17, h = 11;
    std::vector<std::uint32_t> a(w * h), b(w * h);
    for (auto& v : a) v = rng() % 5;
    for (auto& v : b) v = rng() % 4;
    const LabelImage seg = image(w, h, a), gt = image(w, h, b);
    const MccReport r = evaluate(seg, gt);
    for (const RegionScore& sc : r.regions) {
      std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
      for (int i = 0; i < w * h; ++i) {
        const bool s = a[i] == sc.seg_label;
        const bool g = sc.gt_label != 0 && b[i] == sc.gt_label;
        (s ? (g ? tp : fp) : (g ? fn : tn))++;
      }
      CHECK(sc.counts == Confusion{tp, fp, fn, tn});
    }
  }
}

TEST_CASE("matching ties, background-only regions and one-to-one contests") {
  // Seg 1 overlaps gt 1 and gt 2 equally: the smaller gt label wins.
  const LabelImage gt = image(4, 1, {1, 2, 0, 0});
  const LabelImage seg = image(4, 1, {1, 1, 2, 0});
  const auto m = match_regions(seg, gt);
  CHECK(m.at(1) == 1);
  CHECK(m.at(2) == 0);
  // Both seg regions prefer gt 1; one-to-one gives it to the larger overlap.
  const LabelImage gt2 = image(5, 1, {1, 1, 1, 1, 2});
  const LabelImage seg2 = image(5, 1, {1, 1, 1, 2, 2});
  CHECK(match_regions(seg2, gt2).at(2) == 1);
  const auto o = match_regions(seg2, gt2, MatchMode::one_to_one);
  CHECK(o.at(1) == 1);
  CHECK(o.at(2) == 2);
  CHECK_THROWS_AS(evaluate(image(1, 1, {1}), image(2, 1, {1, 1})), Error);
}

TEST_CASE("aggregates: pixel weighted versus mean") {
  const LabelImage gt = image(6, 1, {1, 1, 1, 1, 2, 2});
  const LabelImage seg = image(6, 1, {1, 1, 1, 1, 2, 1});
  const MccReport pw = evaluate(seg, gt);
  EvalOptions mean_opts;
  mean_opts.aggregate = Aggregate::mean;
  const MccReport mn = evaluate(seg, gt, mean_opts);
  double wsum = 0, acc = 0, sum = 0;
  for (const RegionScore& s : pw.regions) {
    wsum += s.weight;
    acc += s.weight * s.mcc;
    sum += s.mcc;
  }
  CHECK(pw.aggregate == doctest::Approx(acc / wsum));
  CHECK(mn.aggregate == doctest::Approx(sum / pw.regions.size()));
}

TEST_CASE("pgm round trip for 8 and 16 bit labels, and ascii P2") {
  const auto dir = testutil::scratch("pgm");
  const LabelImage small = image(3, 2, {0, 1, 2, 3, 4, 255});
  write_pgm(dir / "a.pgm", small);
  CHECK(read_pgm(dir / "a.pgm") == small);
  const LabelImage big = image(2, 2, {0, 256, 1000, 65535});
  write_pgm(dir / "b.pgm", big);
  CHECK(read_pgm(dir / "b.pgm") == big);
  testutil::write_file(dir / "c.pgm", "P2\n# comment\n3 1\n9\n0 4 9\n");
  CHECK(read_pgm(dir / "c.pgm") == image(3, 1, {0, 4, 9}));
  testutil::write_file(dir / "d.pgm", "P7\n");
  CHECK_THROWS_AS(read_pgm(dir / "d.pgm"), Error);
}
