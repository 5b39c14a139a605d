#include "simglyph/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "simglyph/errors.hpp"
#include "simglyph/rng.hpp"

namespace simglyph::features {

GcDescriptor gradient_context(const Point& seed, const imagecore::SeedSet& seeds,
                              const imagecore::GradientField& grad, const GcParams& params) {
  GcDescriptor h{};
  const double r_max = params.radii[3];
  for (const Point& q : seeds.points) {
    if (q == seed) continue;
    const double dx = q.x - seed.x;
    const double dy = q.y - seed.y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (dist == 0.0 || dist > r_max) continue;

    int band = 0;
    while (dist > params.radii[band]) ++band;  // smallest i with dist <= r_i

    double angle = std::atan2(dy, dx);
    if (angle < 0) angle += 2.0 * std::numbers::pi;
    int sector = std::min(GcParams::kSectors - 1,
                          static_cast<int>(angle / (2.0 * std::numbers::pi / GcParams::kSectors)));

    h[GcParams::kSectors * band + sector] += grad.mag_at(q.x, q.y);
  }
  return h;
}

std::vector<GcDescriptor> all_descriptors(const imagecore::SeedSet& seeds,
                                          const imagecore::GradientField& grad,
                                          const GcParams& params) {
  std::vector<GcDescriptor> out;
  out.reserve(seeds.points.size());
  for (const Point& p : seeds.points) out.push_back(gradient_context(p, seeds, grad, params));
  return out;
}

namespace {

double sqdist(const GcDescriptor& a, const GcDescriptor& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

int nearest_center(const GcDescriptor& d, const std::vector<GcDescriptor>& centers) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < centers.size(); ++c) {
    const double dd = sqdist(d, centers[c]);
    if (dd < best_d) {
      best_d = dd;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<GcDescriptor> recompute_means(const std::vector<GcDescriptor>& points,
                                          const std::vector<int>& assign,
                                          const std::vector<GcDescriptor>& old_centers) {
  std::vector<GcDescriptor> centers(old_centers.size(), GcDescriptor{});
  std::vector<int> sizes(old_centers.size(), 0);
  for (size_t i = 0; i < points.size(); ++i) {
    ++sizes[assign[i]];
    for (size_t d = 0; d < points[i].size(); ++d) centers[assign[i]][d] += points[i][d];
  }
  for (size_t c = 0; c < centers.size(); ++c) {
    if (sizes[c] == 0) {
      centers[c] = old_centers[c];  // empty cluster keeps its position
      continue;
    }
    for (double& v : centers[c]) v /= sizes[c];
  }
  return centers;
}

}  // namespace

Codebook build_codebook(const std::vector<GcDescriptor>& descriptors, int k,
                        int min_cluster_size, uint64_t rng_seed) {
  const int n = static_cast<int>(descriptors.size());
  if (k < 1) throw InsufficientDataError("build_codebook: k must be >= 1");
  if (min_cluster_size < 1) throw InsufficientDataError("build_codebook: min_cluster_size must be >= 1");
  if (k > n)
    throw InsufficientDataError("build_codebook: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(n) + " descriptors");

  // Seeded farthest-point initialization; stops early when no point is
  // strictly farther than 0 from the chosen set (duplicates never become
  // extra centers).
  Rng rng(rng_seed);
  std::vector<GcDescriptor> centers;
  centers.push_back(descriptors[rng.index(descriptors.size())]);
  std::vector<double> d2(descriptors.size());
  for (size_t i = 0; i < descriptors.size(); ++i) d2[i] = sqdist(descriptors[i], centers[0]);
  while (static_cast<int>(centers.size()) < k) {
    size_t far = 0;
    for (size_t i = 1; i < descriptors.size(); ++i)
      if (d2[i] > d2[far]) far = i;
    if (d2[far] <= 0.0) break;
    centers.push_back(descriptors[far]);
    for (size_t i = 0; i < descriptors.size(); ++i)
      d2[i] = std::min(d2[i], sqdist(descriptors[i], centers.back()));
  }

  // Lloyd iterations to an assignment fixed point.
  std::vector<int> assign(descriptors.size(), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (size_t i = 0; i < descriptors.size(); ++i) {
      int a = nearest_center(descriptors[i], centers);
      if (a != assign[i]) {
        assign[i] = a;
        changed = true;
      }
    }
    if (!changed) break;
    centers = recompute_means(descriptors, assign, centers);
  }

  // Prune undersized clusters, keeping at least the largest one.
  std::vector<int> sizes(centers.size(), 0);
  for (int a : assign) ++sizes[a];
  std::vector<int> survivors;
  for (size_t c = 0; c < centers.size(); ++c)
    if (sizes[c] >= min_cluster_size) survivors.push_back(static_cast<int>(c));
  if (survivors.empty()) {
    int largest = 0;
    for (size_t c = 1; c < centers.size(); ++c)
      if (sizes[c] > sizes[largest]) largest = static_cast<int>(c);
    survivors.push_back(largest);
  }

  std::vector<GcDescriptor> kept;
  kept.reserve(survivors.size());
  for (int c : survivors) kept.push_back(centers[c]);
  std::vector<int> reassign(descriptors.size());
  for (size_t i = 0; i < descriptors.size(); ++i)
    reassign[i] = nearest_center(descriptors[i], kept);
  kept = recompute_means(descriptors, reassign, kept);

  Codebook cb;
  cb.centers = std::move(kept);
  cb.k = k;
  cb.min_cluster_size = min_cluster_size;
  cb.rng_seed = rng_seed;
  return cb;
}

int assign_codeword(const GcDescriptor& d, const Codebook& cb) {
  if (cb.centers.empty()) throw ConfigError("assign_codeword: empty codebook");
  return nearest_center(d, cb.centers);
}

std::vector<int> assign_codewords(const std::vector<GcDescriptor>& ds, const Codebook& cb) {
  std::vector<int> codes;
  codes.reserve(ds.size());
  for (const auto& d : ds) codes.push_back(assign_codeword(d, cb));
  return codes;
}

IntegralHistogram build_integral_histogram(const imagecore::SeedSet& seeds,
                                           const std::vector<int>& codes, int dims, int width,
                                           int height) {
  if (codes.size() != seeds.points.size())
    throw ConfigError("build_integral_histogram: one code per seed required");
  IntegralHistogram ih;
  ih.width = width;
  ih.height = height;
  ih.dims = dims;
  ih.cum.assign(static_cast<size_t>(width + 1) * (height + 1) * dims, 0);

  auto cell = [&](int x, int y, int c) -> int32_t& {
    return ih.cum[(static_cast<size_t>(y) * (width + 1) + x) * dims + c];
  };
  for (size_t i = 0; i < seeds.points.size(); ++i) {
    const Point& p = seeds.points[i];
    cell(p.x + 1, p.y + 1, codes[i]) += 1;
  }
  for (int y = 1; y <= height; ++y)
    for (int x = 0; x <= width; ++x)
      for (int c = 0; c < dims; ++c) cell(x, y, c) += cell(x, y - 1, c);
  for (int y = 0; y <= height; ++y)
    for (int x = 1; x <= width; ++x)
      for (int c = 0; c < dims; ++c) cell(x, y, c) += cell(x - 1, y, c);
  return ih;
}

CodewordHistogram window_feature(const IntegralHistogram& ih, const Rect& window) {
  if (window.w <= 0 || window.h <= 0 || window.x < 0 || window.y < 0 ||
      window.x + window.w > ih.width || window.y + window.h > ih.height)
    throw BoundsError("window_feature: window outside the image");
  CodewordHistogram h;
  h.counts.resize(ih.dims);
  const int x0 = window.x, y0 = window.y;
  const int x1 = window.x + window.w, y1 = window.y + window.h;
  for (int c = 0; c < ih.dims; ++c)
    h.counts[c] = ih.at(x1, y1, c) - ih.at(x0, y1, c) - ih.at(x1, y0, c) + ih.at(x0, y0, c);
  return h;
}

}  // namespace simglyph::features
