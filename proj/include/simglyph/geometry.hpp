#pragma once

#include <algorithm>
#include <cstdint>

namespace simglyph {

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
  auto operator<=>(const Point&) const = default;
};

// Axis-aligned pixel rectangle; covers columns [x, x+w) and rows [y, y+h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  bool operator==(const Rect&) const = default;
};

inline long long rect_area(const Rect& r) {
  return static_cast<long long>(r.w) * r.h;
}

inline bool rect_contains(const Rect& r, int px, int py) {
  return px >= r.x && px < r.x + r.w && py >= r.y && py < r.y + r.h;
}

inline Rect rect_intersection(const Rect& a, const Rect& b) {
  int x0 = std::max(a.x, b.x);
  int y0 = std::max(a.y, b.y);
  int x1 = std::min(a.x + a.w, b.x + b.w);
  int y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return Rect{0, 0, 0, 0};
  return Rect{x0, y0, x1 - x0, y1 - y0};
}

// Intersection over union of two pixel rectangles.
inline double rect_iou(const Rect& a, const Rect& b) {
  long long inter = rect_area(rect_intersection(a, b));
  long long uni = rect_area(a) + rect_area(b) - inter;
  if (uni <= 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Grow a rectangle by d pixels on every side.
inline Rect rect_dilate(const Rect& r, int d) {
  return Rect{r.x - d, r.y - d, r.w + 2 * d, r.h + 2 * d};
}

}  // namespace simglyph
