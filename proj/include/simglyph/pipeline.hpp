#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simglyph/dsvm.hpp"
#include "simglyph/features.hpp"
#include "simglyph/imagecore.hpp"

namespace simglyph::pipeline {

// Top-2 result of the first-stage multi-class scorer.
struct BaselineOutput {
  int c1 = -1;
  int c2 = -1;
  double s1 = 0.0;
  double s2 = 0.0;
};

// Logistic confidence over the top-2 scores plus the acceptance threshold.
struct ConfidenceGate {
  std::array<double, 3> theta{0.0, 0.0, 0.0};  // bias, s1 weight, s2 weight
  double sigma = 0.96;
};

// h(s1, s2) in (0, 1) for finite scores.
double gate_confidence(const ConfidenceGate& gate, double s1, double s2);

struct GateSample {
  double s1 = 0.0;
  double s2 = 0.0;
  int y = 0;  // 1 = baseline was correct
};

struct GateTrainConfig {
  double learning_rate = 0.1;
  int iterations = 500;
};

// Mean log-likelihood of the labels under the logistic model.
double gate_log_likelihood(const std::array<double, 3>& theta,
                           const std::vector<GateSample>& samples);

// Full-batch gradient ascent from zero; returns the best-by-likelihood
// iterate. Throws DegenerateLabelsError when only one label is present.
std::array<double, 3> train_gate(const std::vector<GateSample>& samples,
                                 const GateTrainConfig& cfg = {});

struct SimilarPair {
  int a = -1;  // a < b
  int b = -1;
  int count = 0;            // pooled confusion count
  int positive_class = -1;  // lower class id by convention
  std::string model_ref;    // attached model location; empty until linked
};

struct SimilarPairTable {
  std::vector<SimilarPair> pairs;  // sorted by (a, b)

  const SimilarPair* find(int x, int y) const;
  bool contains(int x, int y) const { return find(x, y) != nullptr; }
};

// Pool A->B and B->A misclassification counts; keep pairs whose pooled count
// exceeds the threshold.
SimilarPairTable mine_pairs(const std::vector<std::pair<int, int>>& confusion_log, int threshold);

// Default first-stage scorer: nearest centroid over block-averaged 16x16
// pixel vectors with negative-distance scores; centroids shrink toward the
// global mean.
struct NearestCentroidBaseline {
  int grid = 16;
  double shrinkage = 1.0;
  std::vector<int> class_ids;                   // ascending
  std::vector<std::vector<double>> centroids;   // parallel to class_ids

  bool has_class(int id) const;
};

std::vector<double> downsample_vector(const imagecore::GlyphImage& img, int grid);

NearestCentroidBaseline train_baseline(
    const std::vector<std::pair<int, imagecore::GlyphImage>>& samples, int grid = 16,
    double shrinkage = 1.0);

// Top-2 classes by score (negative distance); ties break toward the lower
// class id. Requires at least two trained classes.
BaselineOutput baseline_score(const NearestCentroidBaseline& model,
                              const imagecore::GlyphImage& img);

// One trained discriminative model attached to a mined pair.
struct PairClassifier {
  int class_a = -1;  // a < b
  int class_b = -1;
  int positive_class = -1;
  features::Codebook codebook;
  dsvm::SvmModel model;
};

enum class Route { kBaseline, kSvm, kBaselineFallback };

struct RecognitionResult {
  int class_id = -1;
  Route route = Route::kBaseline;
  BaselineOutput top2;
  double confidence = 0.0;
  std::optional<Rect> window;  // localized window when routed to the pair model
};

struct RecognitionSystem {
  NearestCentroidBaseline baseline;
  ConfidenceGate gate;
  SimilarPairTable table;
  std::map<std::pair<int, int>, PairClassifier> pair_models;
};

// Sigma-independent per-sample work: baseline top-2, gate confidence, and
// (when the top-2 pair is tabled) the pair model's decision.
struct ScoredSample {
  BaselineOutput top2;
  double confidence = 0.0;
  bool pair_in_table = false;
  int svm_class = -1;
  Rect window;
};

ScoredSample score_sample(const RecognitionSystem& sys, const imagecore::GlyphImage& img);

// Same, with the first-stage scores supplied by the caller: any scorer that
// produces a top-2 (c1 != c2, s1 >= s2) can stand in for the built-in
// nearest-centroid baseline.
ScoredSample score_sample(const RecognitionSystem& sys, const imagecore::GlyphImage& img,
                          const BaselineOutput& top2);

// Applies the acceptance threshold to an already scored sample.
RecognitionResult decide(const ScoredSample& scored, double sigma);

// Confidence at or above sigma accepts the baseline's top candidate; below
// it, a tabled top-2 pair routes to its discriminative model, anything else
// falls back to the top candidate.
RecognitionResult recognize(const RecognitionSystem& sys, const imagecore::GlyphImage& img);

}  // namespace simglyph::pipeline
