#include "simglyph/imagecore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace simglyph::imagecore {

namespace {

struct Bbox {
  int x0, y0, x1, y1;  // inclusive
};

bool foreground_bbox(const GlyphImage& img, Bbox& out) {
  int x0 = img.width, y0 = img.height, x1 = -1, y1 = -1;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (!img.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return false;
  out = {x0, y0, x1, y1};
  return true;
}

// One scale-and-center pass. Applied twice by normalize(): a downscale can
// leave the resampled box with empty border rows, so a second pass re-tightens
// to an exact 64-pixel extent and makes the whole function idempotent.
GlyphImage normalize_once(const GlyphImage& src) {
  Bbox bb{};
  foreground_bbox(src, bb);
  const int bw = bb.x1 - bb.x0 + 1;
  const int bh = bb.y1 - bb.y0 + 1;
  const double scale = static_cast<double>(kNormalizedSize) / std::max(bw, bh);
  const int ow = std::max(1, static_cast<int>(std::llround(bw * scale)));
  const int oh = std::max(1, static_cast<int>(std::llround(bh * scale)));

  GlyphImage box(ow, oh);
  for (int oy = 0; oy < oh; ++oy) {
    int sy = bb.y0 + std::min(bh - 1, static_cast<int>((oy + 0.5) * bh / oh));
    for (int ox = 0; ox < ow; ++ox) {
      int sx = bb.x0 + std::min(bw - 1, static_cast<int>((ox + 0.5) * bw / ow));
      box.set(ox, oy, src.at(sx, sy));
    }
  }
  if (!box.has_foreground()) {
    // Sparse input downscaled past its own pixels: nearest-neighbor sampling
    // missed every foreground pixel. Forward-map them instead so the result
    // keeps at least one.
    for (int sy = bb.y0; sy <= bb.y1; ++sy) {
      for (int sx = bb.x0; sx <= bb.x1; ++sx) {
        if (!src.at(sx, sy)) continue;
        int ox = std::min(ow - 1, static_cast<int>((sx - bb.x0 + 0.5) * ow / bw));
        int oy = std::min(oh - 1, static_cast<int>((sy - bb.y0 + 0.5) * oh / bh));
        box.set(ox, oy, 1);
      }
    }
  }

  double cx = 0.0, cy = 0.0;
  long long n = 0;
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      if (!box.at(ox, oy)) continue;
      cx += ox;
      cy += oy;
      ++n;
    }
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);

  const double center = (kNormalizedSize - 1) / 2.0;
  int px = static_cast<int>(std::llround(center - cx));
  int py = static_cast<int>(std::llround(center - cy));
  px = std::clamp(px, 0, kNormalizedSize - ow);
  py = std::clamp(py, 0, kNormalizedSize - oh);

  GlyphImage out(kNormalizedSize, kNormalizedSize);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox)
      if (box.at(ox, oy)) out.set(px + ox, py + oy, 1);
  return out;
}

}  // namespace

GlyphImage normalize(const GlyphImage& raw) {
  if (!raw.has_foreground()) throw EmptyGlyphError("normalize: raster has no foreground pixel");
  return normalize_once(normalize_once(raw));
}

GradientField sobel(const GlyphImage& img) {
  GradientField f;
  f.width = img.width;
  f.height = img.height;
  const size_t n = static_cast<size_t>(img.width) * img.height;
  f.gx.assign(n, 0.0);
  f.gy.assign(n, 0.0);
  f.mag.assign(n, 0.0);

  auto px = [&](int x, int y) -> int {
    return img.in_bounds(x, y) ? img.at(x, y) : 0;  // zero padding
  };
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      int right = px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1);
      int left = px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1);
      int bottom = px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1);
      int top = px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1);
      size_t i = static_cast<size_t>(y) * img.width + x;
      f.gx[i] = right - left;
      f.gy[i] = bottom - top;
      f.mag[i] = std::sqrt(f.gx[i] * f.gx[i] + f.gy[i] * f.gy[i]);
    }
  }
  return f;
}

namespace {

// Clockwise 8-neighborhood in image coordinates (x right, y down),
// starting east.
constexpr std::array<Point, 8> kDirs = {
    Point{1, 0}, Point{1, 1}, Point{0, 1}, Point{-1, 1},
    Point{-1, 0}, Point{-1, -1}, Point{0, -1}, Point{1, -1}};

int dir_index(Point from, Point to) {
  Point d{to.x - from.x, to.y - from.y};
  for (int i = 0; i < 8; ++i)
    if (kDirs[i] == d) return i;
  return -1;
}

// Moore boundary following. The walk state is (pixel, backtrack); the
// transition is deterministic, so the trace stops exactly when a state
// repeats, which for a closed boundary is the initial state.
std::vector<Point> trace_boundary(const GlyphImage& img, Point start) {
  auto fg = [&](Point p) { return img.in_bounds(p.x, p.y) && img.at(p.x, p.y); };

  std::vector<Point> contour;
  contour.push_back(start);

  Point cur = start;
  Point backtrack{start.x - 1, start.y};  // topmost-leftmost pixel: west is background
  std::set<std::pair<Point, Point>> seen_states;
  seen_states.insert({cur, backtrack});

  while (true) {
    int bi = dir_index(cur, backtrack);
    Point next{-1, -1};
    Point prev_bg = backtrack;
    bool found = false;
    for (int k = 1; k <= 8; ++k) {
      int di = (bi + k) % 8;
      Point cand{cur.x + kDirs[di].x, cur.y + kDirs[di].y};
      if (fg(cand)) {
        next = cand;
        found = true;
        break;
      }
      prev_bg = cand;
    }
    if (!found) return contour;  // isolated pixel
    if (!seen_states.insert({next, prev_bg}).second) return contour;
    contour.push_back(next);
    cur = next;
    backtrack = prev_bg;
  }
}

}  // namespace

std::vector<std::vector<Point>> external_contours(const GlyphImage& img) {
  std::vector<std::vector<Point>> out;
  std::vector<uint8_t> visited(img.pixels.size(), 0);

  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      size_t i = static_cast<size_t>(y) * img.width + x;
      if (!img.pixels[i] || visited[i]) continue;
      // Flood fill the 8-connected component; (x, y) is its
      // topmost-then-leftmost pixel because of the scan order.
      std::vector<Point> stack{{x, y}};
      visited[i] = 1;
      while (!stack.empty()) {
        Point p = stack.back();
        stack.pop_back();
        for (const Point& d : kDirs) {
          Point q{p.x + d.x, p.y + d.y};
          if (!img.in_bounds(q.x, q.y)) continue;
          size_t j = static_cast<size_t>(q.y) * img.width + q.x;
          if (!img.pixels[j] || visited[j]) continue;
          visited[j] = 1;
          stack.push_back(q);
        }
      }
      out.push_back(trace_boundary(img, {x, y}));
    }
  }
  return out;
}

SeedSet extract_seeds(const GlyphImage& img) {
  SeedSet seeds;
  std::set<Point> seen;
  for (const auto& contour : external_contours(img)) {
    for (size_t i = 0; i < contour.size(); i += 2) {
      if (seen.insert(contour[i]).second) seeds.points.push_back(contour[i]);
    }
  }
  return seeds;
}

}  // namespace simglyph::imagecore
