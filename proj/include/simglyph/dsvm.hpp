#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simglyph/features.hpp"
#include "simglyph/geometry.hpp"
#include "simglyph/imagecore.hpp"

namespace simglyph::dsvm {

struct Scale {
  int w = 0;
  int h = 0;
  bool operator==(const Scale&) const = default;
};

// Sliding-window index set: every placement of every scale template at
// stride offsets, enumerated scale-major, then y, then x.
struct WindowGrid {
  std::vector<Scale> scales;
  int stride = 4;
  int image_size = imagecore::kNormalizedSize;

  std::vector<Rect> enumerate() const;
  std::string spec_string() const;
  static WindowGrid parse_spec(const std::string& s);
  static WindowGrid default_grid();

  bool operator==(const WindowGrid&) const = default;
};

// Model parameters: weight per codeword plus bias.
struct Mu {
  std::vector<double> w;
  double b = 0.0;

  explicit Mu(size_t dims = 0) : w(dims, 0.0) {}
  Mu(std::vector<double> w_, double b_) : w(std::move(w_)), b(b_) {}
};

// Feature vectors of all grid windows of one sample, row-major.
struct SampleFeatures {
  int dims = 0;
  std::vector<double> data;

  int window_count() const { return dims ? static_cast<int>(data.size()) / dims : 0; }
  const double* row(int i) const { return data.data() + static_cast<size_t>(i) * dims; }
  std::vector<double> row_vec(int i) const {
    return std::vector<double>(row(i), row(i) + dims);
  }
};

// Seeds -> descriptors -> codewords -> integral histogram -> one codeword
// histogram per grid window.
SampleFeatures extract_sample_features(const imagecore::GlyphImage& img,
                                       const features::Codebook& cb,
                                       const std::vector<Rect>& windows,
                                       const features::GcParams& params = {});

struct TrainConfig {
  double C = 1.0;
  double tau = 0.6;
  int max_outer_iters = 30;
  int max_inner_iters = 400;
  double inner_rel_tol = 1e-7;
  int inner_patience = 20;  // consecutive low-improvement iterations before stopping

  void validate() const;
};

struct OuterTraceRow {
  double obj = 0.0;        // regularizer plus C-weighted total slack; nonnegative
  double tv = 0.0;         // total violation of the freshly selected windows
  int cache_size = 0;      // constraint cache size after selection
  std::vector<double> inner_gamma;
};

struct ConvergenceTrace {
  std::vector<OuterTraceRow> outer;
};

struct SvmModel {
  std::vector<double> w;
  double b = 0.0;
  WindowGrid grid;
  uint64_t codebook_hash = 0;
  double C = 1.0;
  double tau = 0.6;
};

// Unconstrained objective over the full window sets: 0.5|w|^2 plus C-weighted
// hinge terms floored at -1 (positives use the negated best window score,
// negatives the best window score).
double eval_objective(const Mu& mu, const std::vector<SampleFeatures>& pos,
                      const std::vector<SampleFeatures>& neg, double C);

struct WindowScore {
  int window = -1;
  double score = 0.0;
};

// Highest-scoring window of a sample under mu; ties go to the first window in
// enumeration order.
WindowScore most_violated(const Mu& mu, const SampleFeatures& sample);

using FeatureVec = std::vector<double>;

// Inner objective with the positive windows fixed to the given selections
// (one hinge per vector).
double gamma_value(const Mu& mu, const std::vector<FeatureVec>& positives,
                   const std::vector<SampleFeatures>& neg, double C);

// One subgradient of gamma_value at mu: the regularizer gradient plus the
// active fixed-positive terms and the active per-negative best-window terms.
Mu subgradient(const Mu& mu, const std::vector<FeatureVec>& positives,
               const std::vector<SampleFeatures>& neg, double C);

struct InnerResult {
  Mu mu{0};
  std::vector<double> gamma_trace;  // gamma at each iterate, starting from mu0
};

// Subgradient descent with step 1/k from mu0; keeps and returns the
// best-by-gamma iterate. Stops after `inner_patience` consecutive iterations
// whose relative best-gamma improvement is below inner_rel_tol, or at
// max_inner_iters.
InnerResult inner_solve(const Mu& mu0, const std::vector<FeatureVec>& positives,
                        const std::vector<SampleFeatures>& neg, const TrainConfig& cfg);

struct TrainResult {
  SvmModel model;
  ConvergenceTrace trace;
};

// Alternating outer loop: per iteration, select each positive sample's best
// window under the current model and re-run the inner solver on those picks,
// warm-started at the current model. Every distinct selection also lands in
// a deduplicated constraint cache reported by the trace. Stops when the
// total violation of the fresh selections drops below tau.
TrainResult train(const std::vector<SampleFeatures>& pos, const std::vector<SampleFeatures>& neg,
                  const TrainConfig& cfg, const WindowGrid& grid, const features::Codebook& cb);

struct Prediction {
  int label = 0;  // +1 or -1
  Rect window;
  int window_index = -1;
  double score = 0.0;
};

// Joint localization and classification: the argmax window, its score, and
// the sign decision (score > 0 is positive).
Prediction predict(const SvmModel& model, const SampleFeatures& sample);

}  // namespace simglyph::dsvm
