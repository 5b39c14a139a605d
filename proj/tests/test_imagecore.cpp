#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "simglyph/imagecore.hpp"
#include "simglyph/rng.hpp"

using namespace simglyph;
using imagecore::GlyphImage;

namespace {

GlyphImage filled_rect(int W, int H, int x0, int y0, int w, int h) {
  GlyphImage img(W, H);
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) img.set(x, y, 1);
  return img;
}

GlyphImage random_raster(Rng& rng, int max_side = 100) {
  const int w = rng.range(4, max_side);
  const int h = rng.range(4, max_side);
  GlyphImage img(w, h);
  const double density = rng.real(0.02, 0.6);
  for (auto& p : img.pixels) p = rng.real() < density ? 1 : 0;
  if (!img.has_foreground()) img.set(rng.range(0, w - 1), rng.range(0, h - 1), 1);
  return img;
}

// Independent 3x3 convolution with zero padding.
void sobel_oracle(const GlyphImage& img, int x, int y, int& gx, int& gy) {
  static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  gx = gy = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int xx = x + dx, yy = y + dy;
      const int v = img.in_bounds(xx, yy) ? img.at(xx, yy) : 0;
      gx += kx[dy + 1][dx + 1] * v;
      gy += ky[dy + 1][dx + 1] * v;
    }
  }
}

}  // namespace

TEST_SUITE("imagecore") {

TEST_CASE("normalize keeps an already centered full-extent raster") {
  // Hollow box spanning the full raster: bounding box is 64x64 and the
  // centroid sits at the exact center by symmetry.
  GlyphImage img(64, 64);
  for (int i = 0; i < 64; ++i) {
    img.set(i, 0, 1);
    img.set(i, 63, 1);
    img.set(0, i, 1);
    img.set(63, i, 1);
  }
  CHECK(imagecore::normalize(img) == img);

  const GlyphImage full = filled_rect(64, 64, 0, 0, 64, 64);
  CHECK(imagecore::normalize(full) == full);
}

TEST_CASE("normalize downscales a full 128x128 square to all-foreground") {
  const GlyphImage big = filled_rect(128, 128, 0, 0, 128, 128);
  const GlyphImage out = imagecore::normalize(big);
  CHECK(out.width == 64);
  CHECK(out.height == 64);
  CHECK(std::count(out.pixels.begin(), out.pixels.end(), 1) == 64 * 64);
}

TEST_CASE("normalize scales an 80x20 box per the scalar oracle") {
  // scale = 64 / max(80, 20) = 0.8 -> output box 64x16, centered.
  const GlyphImage img = filled_rect(100, 40, 10, 10, 80, 20);
  const GlyphImage out = imagecore::normalize(img);
  const int expected_w = 64, expected_h = 16;
  const int expected_x = 0, expected_y = 24;  // (64-64)/2, round(31.5 - 7.5)
  int n = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const bool inside = x >= expected_x && x < expected_x + expected_w && y >= expected_y &&
                          y < expected_y + expected_h;
      CHECK(out.at(x, y) == (inside ? 1 : 0));
      n += out.at(x, y);
    }
  }
  CHECK(n == expected_w * expected_h);
}

TEST_CASE("normalize rejects an all-background raster") {
  GlyphImage img(10, 10);
  CHECK_THROWS_AS(imagecore::normalize(img), EmptyGlyphError);
}

TEST_CASE("normalize is idempotent") {
  Rng rng(2024);
  for (int it = 0; it < 60; ++it) {
    const GlyphImage raw = random_raster(rng, 120);
    const GlyphImage once = imagecore::normalize(raw);
    CHECK(imagecore::normalize(once) == once);
  }
}

TEST_CASE("sobel of a uniform raster vanishes away from the padding border") {
  for (int fill : {0, 1}) {
    GlyphImage img(20, 20);
    std::fill(img.pixels.begin(), img.pixels.end(), static_cast<uint8_t>(fill));
    const auto f = imagecore::sobel(img);
    for (int y = 1; y < 19; ++y) {
      for (int x = 1; x < 19; ++x) {
        CHECK(f.gx_at(x, y) == 0.0);
        CHECK(f.gy_at(x, y) == 0.0);
      }
    }
  }
}

TEST_CASE("sobel of a vertical step edge") {
  GlyphImage img(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 8; x < 16; ++x) img.set(x, y, 1);
  const auto f = imagecore::sobel(img);
  for (int y = 1; y < 15; ++y) {
    CHECK(std::abs(f.gx_at(7, y)) == 4.0);
    CHECK(std::abs(f.gx_at(8, y)) == 4.0);
    CHECK(f.gy_at(7, y) == 0.0);
    CHECK(f.gy_at(8, y) == 0.0);
    CHECK(f.gx_at(3, y) == 0.0);
    CHECK(f.gx_at(12, y) == 0.0);
  }
}

TEST_CASE("sobel of a single center pixel matches direct kernel application") {
  GlyphImage img(9, 9);
  img.set(4, 4, 1);
  const auto f = imagecore::sobel(img);
  int nonzero = 0;
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      int gx, gy;
      sobel_oracle(img, x, y, gx, gy);
      CHECK(f.gx_at(x, y) == static_cast<double>(gx));
      CHECK(f.gy_at(x, y) == static_cast<double>(gy));
      if (gx || gy) ++nonzero;
    }
  }
  CHECK(nonzero == 8);  // the 8 neighbors respond, the center does not
}

TEST_CASE("sobel equals brute-force convolution on random rasters") {
  Rng rng(11);
  for (int it = 0; it < 100; ++it) {
    const GlyphImage img = random_raster(rng, 24);
    const auto f = imagecore::sobel(img);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        int gx, gy;
        sobel_oracle(img, x, y, gx, gy);
        REQUIRE(f.gx_at(x, y) == static_cast<double>(gx));
        REQUIRE(f.gy_at(x, y) == static_cast<double>(gy));
        REQUIRE(f.mag_at(x, y) ==
                doctest::Approx(std::sqrt(double(gx) * gx + double(gy) * gy)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("a single foreground pixel yields one seed") {
  GlyphImage img(8, 8);
  img.set(3, 5, 1);
  const auto seeds = imagecore::extract_seeds(img);
  REQUIRE(seeds.points.size() == 1);
  CHECK(seeds.points[0] == Point{3, 5});
}

TEST_CASE("a filled 4x4 square has a 12-pixel contour and 6 seeds") {
  const GlyphImage img = filled_rect(12, 12, 4, 4, 4, 4);
  const auto contours = imagecore::external_contours(img);
  REQUIRE(contours.size() == 1);
  CHECK(contours[0].size() == 12);
  CHECK(imagecore::extract_seeds(img).points.size() == 6);
}

TEST_CASE("seed count is ceil(contour/2) for simple closed shapes") {
  Rng rng(5);
  for (int it = 0; it < 40; ++it) {
    GlyphImage img(40, 40);
    if (it % 2 == 0) {
      const int w = rng.range(2, 20), h = rng.range(2, 20);
      img = filled_rect(40, 40, rng.range(1, 38 - w), rng.range(1, 38 - h), w, h);
    } else {
      const int cx = rng.range(12, 28), cy = rng.range(12, 28), r = rng.range(3, 9);
      for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x)
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.set(x, y, 1);
    }
    const auto contours = imagecore::external_contours(img);
    REQUIRE(contours.size() == 1);
    const auto seeds = imagecore::extract_seeds(img);
    CHECK(seeds.points.size() == (contours[0].size() + 1) / 2);
  }
}

TEST_CASE("seeds lie on the contour and never repeat") {
  Rng rng(17);
  for (int it = 0; it < 30; ++it) {
    const GlyphImage img = random_raster(rng, 40);
    const auto seeds = imagecore::extract_seeds(img);
    REQUIRE(!seeds.points.empty());
    std::set<Point> unique(seeds.points.begin(), seeds.points.end());
    CHECK(unique.size() == seeds.points.size());
    for (const Point& p : seeds.points) {
      REQUIRE(img.at(p.x, p.y) == 1);
      bool background_neighbor = false;
      const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int xx = p.x + dx[d], yy = p.y + dy[d];
        if (!img.in_bounds(xx, yy) || !img.at(xx, yy)) background_neighbor = true;
      }
      CHECK(background_neighbor);
    }
  }
}

TEST_CASE("a typical multi-stroke glyph yields 200-400 seeds") {
  GlyphImage img(64, 64);
  for (int row = 0; row < 6; ++row) {
    const int y0 = 2 + row * 10;
    for (int y = y0; y < y0 + 3; ++y)
      for (int x = 4; x < 60; ++x) img.set(x, y, 1);
  }
  const auto seeds = imagecore::extract_seeds(img);
  CHECK(seeds.points.size() >= 200);
  CHECK(seeds.points.size() <= 400);
}

TEST_CASE("rectangle intersection-over-union against hand-computed pairs") {
  CHECK(rect_iou(Rect{0, 0, 4, 4}, Rect{0, 0, 4, 4}) == 1.0);
  CHECK(rect_iou(Rect{0, 0, 4, 4}, Rect{8, 8, 4, 4}) == 0.0);
  CHECK(rect_iou(Rect{0, 0, 4, 4}, Rect{2, 2, 4, 4}) ==
        doctest::Approx(4.0 / 28.0).epsilon(1e-12));  // 2x2 overlap, union 28
  CHECK(rect_iou(Rect{0, 0, 8, 8}, Rect{2, 2, 4, 4}) ==
        doctest::Approx(16.0 / 64.0).epsilon(1e-12));  // containment
  CHECK(rect_iou(Rect{0, 0, 4, 4}, Rect{4, 0, 4, 4}) == 0.0);  // edge-adjacent
}

TEST_CASE("components are seeded in top-left-first order") {
  GlyphImage img(30, 30);
  // bottom-right blob first in insertion order, top-left second
  for (int y = 20; y < 24; ++y)
    for (int x = 20; x < 24; ++x) img.set(x, y, 1);
  for (int y = 2; y < 6; ++y)
    for (int x = 2; x < 6; ++x) img.set(x, y, 1);
  const auto seeds = imagecore::extract_seeds(img);
  REQUIRE(seeds.points.size() > 2);
  CHECK(seeds.points.front() == Point{2, 2});
  bool saw_second_component = false;
  for (size_t i = 1; i < seeds.points.size(); ++i) {
    if (seeds.points[i].x >= 20) {
      saw_second_component = true;
      // once the second component starts, no first-component point follows
      for (size_t j = i; j < seeds.points.size(); ++j) REQUIRE(seeds.points[j].x >= 20);
      break;
    }
  }
  CHECK(saw_second_component);
}

}  // TEST_SUITE
