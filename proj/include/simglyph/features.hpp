#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "simglyph/geometry.hpp"
#include "simglyph/imagecore.hpp"

namespace simglyph::features {

// Log-polar binning parameters: 4 radial bands x 8 angular sectors = 32 bins.
struct GcParams {
  std::array<double, 4> radii{3.0, 4.0, 8.0, 16.0};
  static constexpr int kSectors = 8;
  static constexpr int kBands = 4;
  static constexpr int kBins = kSectors * kBands;
};

// 32-dimensional descriptor; bin k = 8 * band + sector.
using GcDescriptor = std::array<double, GcParams::kBins>;

// Sum of gradient magnitudes of the other seed points falling in each
// log-polar bin around `seed`. Seeds farther than the outer radius (and the
// seed itself) contribute nothing.
GcDescriptor gradient_context(const Point& seed, const imagecore::SeedSet& seeds,
                              const imagecore::GradientField& grad, const GcParams& params = {});

// Descriptor for every seed in order.
std::vector<GcDescriptor> all_descriptors(const imagecore::SeedSet& seeds,
                                          const imagecore::GradientField& grad,
                                          const GcParams& params = {});

// K-means visual dictionary. Centers are means of their final members; no
// retained cluster is smaller than min_cluster_size.
struct Codebook {
  std::vector<GcDescriptor> centers;
  int k = 0;
  int min_cluster_size = 1;
  uint64_t rng_seed = 0;

  int dims() const { return GcParams::kBins; }
  int size() const { return static_cast<int>(centers.size()); }
};

// Default pruning threshold: max(2, 0.1% of the descriptor count).
inline int default_min_cluster_size(std::size_t descriptor_count) {
  return static_cast<int>(std::max<std::size_t>(2, descriptor_count / 1000));
}

// Deterministic given the seed: RNG picks the first center, the rest follow
// farthest-point initialization; Lloyd iterations run to an assignment fixed
// point (or 100 iterations); undersized clusters are dropped, their members
// reassigned to the nearest survivor, and surviving centers recomputed once.
// Throws InsufficientDataError when k > |descriptors|.
Codebook build_codebook(const std::vector<GcDescriptor>& descriptors, int k,
                        int min_cluster_size, uint64_t rng_seed);

// Index of the nearest center by squared Euclidean distance; ties go to the
// lowest index.
int assign_codeword(const GcDescriptor& d, const Codebook& cb);

std::vector<int> assign_codewords(const std::vector<GcDescriptor>& ds, const Codebook& cb);

// Raw codeword counts of the seeds inside one sub-window.
struct CodewordHistogram {
  std::vector<int> counts;
};

// Cumulative per-codeword seed counts supporting O(1) window queries via
// 4-corner inclusion-exclusion. Window boundaries are inclusive of seeds.
struct IntegralHistogram {
  int width = 0;
  int height = 0;
  int dims = 0;
  std::vector<int32_t> cum;  // (width+1) x (height+1) x dims

  int32_t at(int x, int y, int c) const {
    return cum[(static_cast<size_t>(y) * (width + 1) + x) * dims + c];
  }
};

IntegralHistogram build_integral_histogram(const imagecore::SeedSet& seeds,
                                           const std::vector<int>& codes, int dims, int width,
                                           int height);

// Counts of seeds inside `window`; throws BoundsError when the window leaves
// the image.
CodewordHistogram window_feature(const IntegralHistogram& ih, const Rect& window);

}  // namespace simglyph::features
