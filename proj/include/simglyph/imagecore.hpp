#pragma once

#include <cstdint>
#include <vector>

#include "simglyph/errors.hpp"
#include "simglyph/geometry.hpp"

namespace simglyph::imagecore {

// Side length of the normalized raster.
inline constexpr int kNormalizedSize = 64;

// Binary character raster; foreground = 1, background = 0, row-major.
struct GlyphImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  GlyphImage() = default;
  GlyphImage(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h, 0) {}

  uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  void set(int x, int y, uint8_t v) { pixels[static_cast<size_t>(y) * width + x] = v; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

  bool has_foreground() const {
    for (uint8_t p : pixels)
      if (p) return true;
    return false;
  }

  bool operator==(const GlyphImage&) const = default;
};

// Signed Sobel responses plus magnitude per pixel.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> gx, gy, mag;

  double gx_at(int x, int y) const { return gx[static_cast<size_t>(y) * width + x]; }
  double gy_at(int x, int y) const { return gy[static_cast<size_t>(y) * width + x]; }
  double mag_at(int x, int y) const { return mag[static_cast<size_t>(y) * width + x]; }
};

// Ordered subsampled external-contour pixels.
struct SeedSet {
  std::vector<Point> points;
};

// Scale the foreground bounding box (aspect-preserving, nearest-neighbor) to
// fit the 64x64 raster and center it on the foreground centroid. Output is
// binary and a fixed point of this function. Throws EmptyGlyphError when the
// input has no foreground pixel.
GlyphImage normalize(const GlyphImage& raw);

// 3x3 Sobel kernels with zero padding at the borders.
GradientField sobel(const GlyphImage& img);

// External contour of every 8-connected foreground component, traced
// clockwise from the topmost-then-leftmost pixel (Moore boundary following).
// Components are ordered by their topmost-then-leftmost pixel.
std::vector<std::vector<Point>> external_contours(const GlyphImage& img);

// Every second external-contour pixel, starting with the first; components
// concatenated in top-left-first order; duplicates dropped.
SeedSet extract_seeds(const GlyphImage& img);

}  // namespace simglyph::imagecore
