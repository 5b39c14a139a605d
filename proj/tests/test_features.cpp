#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <set>

#include "simglyph/features.hpp"
#include "simglyph/rng.hpp"
#include "simglyph/serialize.hpp"

using namespace simglyph;
using features::Codebook;
using features::GcDescriptor;
using features::GcParams;
using imagecore::GradientField;
using imagecore::SeedSet;

namespace {

GradientField zero_field(int w, int h) {
  GradientField f;
  f.width = w;
  f.height = h;
  f.gx.assign(static_cast<size_t>(w) * h, 0.0);
  f.gy.assign(static_cast<size_t>(w) * h, 0.0);
  f.mag.assign(static_cast<size_t>(w) * h, 0.0);
  return f;
}

void set_mag(GradientField& f, int x, int y, double m) {
  f.mag[static_cast<size_t>(y) * f.width + x] = m;
}

// Straight-line transcription of the log-polar binning, written
// independently of the library loop.
GcDescriptor gc_oracle(const Point& p, const SeedSet& seeds, const GradientField& grad) {
  GcDescriptor h{};
  for (const Point& q : seeds.points) {
    if (q.x == p.x && q.y == p.y) continue;
    const double d = std::hypot(q.x - p.x, q.y - p.y);
    if (d > 16.0) continue;
    int band;
    if (d <= 3.0)
      band = 0;
    else if (d <= 4.0)
      band = 1;
    else if (d <= 8.0)
      band = 2;
    else
      band = 3;
    double deg = std::atan2(double(q.y - p.y), double(q.x - p.x)) * 180.0 / std::numbers::pi;
    if (deg < 0) deg += 360.0;
    int sector = static_cast<int>(deg / 45.0);
    if (sector > 7) sector = 7;
    h[8 * band + sector] += grad.mag[static_cast<size_t>(q.y) * grad.width + q.x];
  }
  return h;
}

std::vector<GcDescriptor> random_descriptors(Rng& rng, int n, double scale = 5.0) {
  std::vector<GcDescriptor> out(n);
  for (auto& d : out)
    for (auto& v : d) v = rng.real(0.0, scale);
  return out;
}

double inertia(const std::vector<GcDescriptor>& points, const std::vector<GcDescriptor>& centers) {
  double total = 0.0;
  for (const auto& p : points) {
    double best = 1e300;
    for (const auto& c : centers) {
      double s = 0.0;
      for (size_t i = 0; i < p.size(); ++i) s += (p[i] - c[i]) * (p[i] - c[i]);
      best = std::min(best, s);
    }
    total += best;
  }
  return total;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("descriptor is zero without neighbors in range") {
  auto f = zero_field(64, 64);
  SeedSet seeds;
  seeds.points = {{10, 10}, {40, 40}};  // distance 42 > r4
  set_mag(f, 40, 40, 7.0);
  const auto d = features::gradient_context({10, 10}, seeds, f);
  for (double v : d) CHECK(v == 0.0);
}

TEST_CASE("single neighbor at offset (5, 0) lands in bin 16") {
  auto f = zero_field(64, 64);
  SeedSet seeds;
  seeds.points = {{10, 10}, {15, 10}};
  set_mag(f, 15, 10, 3.0);
  const auto d = features::gradient_context({10, 10}, seeds, f);
  for (int k = 0; k < GcParams::kBins; ++k) CHECK(d[k] == (k == 16 ? 3.0 : 0.0));
}

TEST_CASE("descriptor matches the independent binning oracle") {
  Rng rng(99);
  for (int it = 0; it < 50; ++it) {
    auto f = zero_field(64, 64);
    SeedSet seeds;
    const Point p{32, 32};
    seeds.points.push_back(p);
    std::set<Point> used{p};
    for (int i = 0; i < 10; ++i) {
      Point q{rng.range(14, 50), rng.range(14, 50)};
      if (!used.insert(q).second) continue;
      seeds.points.push_back(q);
      set_mag(f, q.x, q.y, rng.real(0.1, 4.0));
    }
    const auto got = features::gradient_context(p, seeds, f);
    const auto want = gc_oracle(p, seeds, f);
    for (int k = 0; k < GcParams::kBins; ++k)
      CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
  }
}

TEST_CASE("descriptor ignores gradient changes outside the outer radius") {
  Rng rng(7);
  auto f = zero_field(64, 64);
  SeedSet seeds;
  for (int i = 0; i < 30; ++i) {
    Point q{rng.range(20, 44), rng.range(20, 44)};
    seeds.points.push_back(q);
    set_mag(f, q.x, q.y, rng.real(0.5, 2.0));
  }
  const Point p = seeds.points[0];
  const auto before = features::gradient_context(p, seeds, f);

  auto perturbed = f;
  std::set<Point> seed_set(seeds.points.begin(), seeds.points.end());
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const double dist = std::hypot(x - p.x, y - p.y);
      const bool is_seed = seed_set.count(Point{x, y}) > 0;
      if (dist > 16.0 || (!is_seed && dist > 0))
        set_mag(perturbed, x, y, rng.real(0.0, 100.0));
    }
  }
  const auto after = features::gradient_context(p, seeds, perturbed);
  CHECK(std::memcmp(before.data(), after.data(), sizeof(before)) == 0);
}

TEST_CASE("every in-range neighbor falls in exactly one bin") {
  Rng rng(123);
  for (int it = 0; it < 30; ++it) {
    auto f = zero_field(64, 64);
    SeedSet seeds;
    std::set<Point> used;
    for (int i = 0; i < 40; ++i) {
      Point q{rng.range(0, 63), rng.range(0, 63)};
      if (!used.insert(q).second) continue;
      seeds.points.push_back(q);
      set_mag(f, q.x, q.y, 1.0);  // unit magnitudes turn sums into counts
    }
    const Point p = seeds.points[rng.index(seeds.points.size())];
    const auto d = features::gradient_context(p, seeds, f);
    double binned = 0.0;
    for (double v : d) binned += v;
    int in_range = 0;
    for (const Point& q : seeds.points) {
      if (q == p) continue;
      if (std::hypot(q.x - p.x, q.y - p.y) <= 16.0) ++in_range;
    }
    CHECK(binned == doctest::Approx(static_cast<double>(in_range)).epsilon(1e-12));
  }
}

TEST_CASE("k distinct duplicated points become the k centers") {
  Rng rng(3);
  const int k = 5;
  auto distinct = random_descriptors(rng, k, 10.0);
  std::vector<GcDescriptor> data;
  for (int copy = 0; copy < 10; ++copy)
    for (const auto& d : distinct) data.push_back(d);
  const auto cb = features::build_codebook(data, k, 1, 42);
  REQUIRE(cb.size() == k);
  auto sorted_want = distinct;
  auto sorted_got = cb.centers;
  auto less = [](const GcDescriptor& a, const GcDescriptor& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::sort(sorted_want.begin(), sorted_want.end(), less);
  std::sort(sorted_got.begin(), sorted_got.end(), less);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < GcParams::kBins; ++i)
      CHECK(sorted_got[c][i] == doctest::Approx(sorted_want[c][i]).epsilon(1e-12));
}

TEST_CASE("identical descriptors collapse to one center") {
  GcDescriptor d{};
  d[4] = 2.5;
  std::vector<GcDescriptor> data(12, d);
  const auto cb = features::build_codebook(data, 3, 2, 9);
  REQUIRE(cb.size() == 1);
  for (int i = 0; i < GcParams::kBins; ++i) CHECK(cb.centers[0][i] == d[i]);
}

TEST_CASE("k-means improves on its initialization and produces mean centers") {
  Rng rng(31);
  const auto data = random_descriptors(rng, 200);
  const uint64_t seed = 77;
  const auto cb = features::build_codebook(data, 8, 1, seed);

  // Replicate the seeded farthest-point initialization independently.
  Rng init_rng(seed);
  std::vector<GcDescriptor> init{data[init_rng.index(data.size())]};
  while (init.size() < 8) {
    size_t far = 0;
    double far_d = -1.0;
    for (size_t i = 0; i < data.size(); ++i) {
      double best = 1e300;
      for (const auto& c : init) {
        double s = 0.0;
        for (size_t j = 0; j < data[i].size(); ++j)
          s += (data[i][j] - c[j]) * (data[i][j] - c[j]);
        best = std::min(best, s);
      }
      if (best > far_d) {
        far_d = best;
        far = i;
      }
    }
    init.push_back(data[far]);
  }
  CHECK(inertia(data, cb.centers) <= inertia(data, init) + 1e-9);

  // Each center is the mean of the points assigned to it.
  std::vector<GcDescriptor> sums(cb.size(), GcDescriptor{});
  std::vector<int> counts(cb.size(), 0);
  for (const auto& p : data) {
    const int a = features::assign_codeword(p, cb);
    ++counts[a];
    for (int i = 0; i < GcParams::kBins; ++i) sums[a][i] += p[i];
  }
  for (int c = 0; c < cb.size(); ++c) {
    REQUIRE(counts[c] > 0);
    for (int i = 0; i < GcParams::kBins; ++i)
      CHECK(cb.centers[c][i] == doctest::Approx(sums[c][i] / counts[c]).epsilon(1e-9));
  }
}

TEST_CASE("codebook construction is deterministic") {
  Rng rng(55);
  const auto data = random_descriptors(rng, 120);
  const auto a = features::build_codebook(data, 6, 2, 1234);
  const auto b = features::build_codebook(data, 6, 2, 1234);
  REQUIRE(a.size() == b.size());
  for (int c = 0; c < a.size(); ++c)
    CHECK(std::memcmp(a.centers[c].data(), b.centers[c].data(), sizeof(GcDescriptor)) == 0);
}

TEST_CASE("pruning respects min_cluster_size") {
  Rng rng(66);
  // two tight clouds of 20 plus 3 outliers; min_cluster_size 5 prunes the
  // outlier cluster(s)
  std::vector<GcDescriptor> data;
  for (int i = 0; i < 20; ++i) {
    GcDescriptor d{};
    d[0] = 1.0 + rng.real(0.0, 0.01);
    data.push_back(d);
  }
  for (int i = 0; i < 20; ++i) {
    GcDescriptor d{};
    d[0] = 9.0 + rng.real(0.0, 0.01);
    data.push_back(d);
  }
  for (int i = 0; i < 3; ++i) {
    GcDescriptor d{};
    d[0] = 12.0 + 0.5 * i;
    data.push_back(d);
  }
  const auto cb = features::build_codebook(data, 6, 5, 5);
  std::vector<int> counts(cb.size(), 0);
  for (const auto& p : data) ++counts[features::assign_codeword(p, cb)];
  for (int c = 0; c < cb.size(); ++c) CHECK(counts[c] >= 5);
}

TEST_CASE("insufficient descriptors raise an error") {
  Rng rng(1);
  const auto data = random_descriptors(rng, 4);
  CHECK_THROWS_AS(features::build_codebook(data, 5, 1, 0), InsufficientDataError);
}

TEST_CASE("assign_codeword exact match, tie-break, and scan oracle") {
  Codebook cb;
  GcDescriptor c0{}, c1{}, c2{};
  c1[0] = 2.0;
  c2[5] = 1.0;
  cb.centers = {c0, c1, c2};

  CHECK(features::assign_codeword(c2, cb) == 2);

  GcDescriptor mid{};
  mid[0] = 1.0;  // equidistant between c0 and c1
  CHECK(features::assign_codeword(mid, cb) == 0);

  Rng rng(8);
  for (int it = 0; it < 100; ++it) {
    Codebook rcb;
    rcb.centers = random_descriptors(rng, 7);
    GcDescriptor q = random_descriptors(rng, 1)[0];
    int best = 0;
    double best_d = 1e300;
    for (size_t c = 0; c < rcb.centers.size(); ++c) {
      double s = 0.0;
      for (int i = 0; i < GcParams::kBins; ++i)
        s += (q[i] - rcb.centers[c][i]) * (q[i] - rcb.centers[c][i]);
      if (s < best_d) {
        best_d = s;
        best = static_cast<int>(c);
      }
    }
    CHECK(features::assign_codeword(q, rcb) == best);
  }
}

TEST_CASE("integral histogram equals brute-force window counts") {
  Rng rng(44);
  for (int it = 0; it < 20; ++it) {
    const int dims = rng.range(2, 6);
    SeedSet seeds;
    std::vector<int> codes;
    std::set<Point> used;
    const int n = rng.range(5, 60);
    for (int i = 0; i < n; ++i) {
      Point p{rng.range(0, 63), rng.range(0, 63)};
      if (!used.insert(p).second) continue;
      seeds.points.push_back(p);
      codes.push_back(static_cast<int>(rng.index(dims)));
    }
    const auto ih = features::build_integral_histogram(seeds, codes, dims, 64, 64);

    // full-image window recovers the per-codeword totals
    const auto full = features::window_feature(ih, Rect{0, 0, 64, 64});
    std::vector<int> totals(dims, 0);
    for (int c : codes) ++totals[c];
    CHECK(full.counts == totals);

    for (int q = 0; q < 50; ++q) {
      const int w = rng.range(1, 64), h = rng.range(1, 64);
      const Rect win{rng.range(0, 64 - w), rng.range(0, 64 - h), w, h};
      const auto got = features::window_feature(ih, win);
      std::vector<int> want(dims, 0);
      for (size_t i = 0; i < seeds.points.size(); ++i) {
        const Point& p = seeds.points[i];
        if (p.x >= win.x && p.x <= win.x + win.w - 1 && p.y >= win.y && p.y <= win.y + win.h - 1)
          ++want[codes[i]];
      }
      REQUIRE(got.counts == want);
    }
  }
}

TEST_CASE("window queries outside the image raise BoundsError") {
  SeedSet seeds;
  seeds.points = {{1, 1}};
  const auto ih = features::build_integral_histogram(seeds, {0}, 1, 64, 64);
  CHECK_THROWS_AS(features::window_feature(ih, Rect{60, 0, 8, 8}), BoundsError);
  CHECK_THROWS_AS(features::window_feature(ih, Rect{-1, 0, 4, 4}), BoundsError);
  CHECK_THROWS_AS(features::window_feature(ih, Rect{0, 0, 0, 4}), BoundsError);
  const auto empty = features::window_feature(ih, Rect{10, 10, 5, 5});
  CHECK(empty.counts == std::vector<int>{0});
}

TEST_CASE("codebook text round trip is stable") {
  Rng rng(21);
  const auto data = random_descriptors(rng, 50);
  const auto cb = features::build_codebook(data, 4, 2, 17);
  const auto text = serialize::codebook_text(cb);
  const auto parsed = serialize::parse_codebook(text);
  CHECK(parsed.k == cb.k);
  CHECK(parsed.min_cluster_size == cb.min_cluster_size);
  CHECK(parsed.rng_seed == cb.rng_seed);
  REQUIRE(parsed.size() == cb.size());
  for (int c = 0; c < cb.size(); ++c)
    for (int i = 0; i < GcParams::kBins; ++i)
      CHECK(parsed.centers[c][i] == doctest::Approx(cb.centers[c][i]).epsilon(1e-8));
  CHECK(serialize::codebook_text(parsed) == text);
}

}  // TEST_SUITE
