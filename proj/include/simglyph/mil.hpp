#pragma once

#include <cstdint>
#include <vector>

#include "simglyph/dsvm.hpp"
#include "simglyph/geometry.hpp"

namespace simglyph::mil {

// Window-distance weak classifier: compares a stored codeword-histogram
// pattern against the sample's histogram at one grid window and thresholds
// the Euclidean distance with a polarity.
struct MilWeakClassifier {
  std::vector<int> pattern;
  int window_index = -1;
  Rect window;
  int polarity = 1;  // +1 or -1
  double threshold = 0.0;
};

// Euclidean distance between the pattern and the sample's histogram at the
// weak classifier's window.
double window_distance(const std::vector<int>& pattern, const dsvm::SampleFeatures& sample,
                       int window_index);

// +1 iff distance * polarity < threshold * polarity.
int weak_classify(const MilWeakClassifier& w, const dsvm::SampleFeatures& sample);

struct PerceptronConfig {
  double alpha = 0.1;
  int epochs = 20;
};

// Perceptron-style threshold fit: T starts at 0 and moves by
// distr(i) * alpha * (y_i - yhat_i) per sample pass for `epochs` passes.
// `distances` holds the precomputed pattern-to-sample distances.
double perceptron_threshold(const std::vector<double>& distances, const std::vector<int>& labels,
                            const std::vector<double>& distr, int polarity,
                            const PerceptronConfig& cfg = {});

// Trace value of the threshold fit: minus the distr-weighted label mass of
// the currently misclassified samples times the threshold.
double perceptron_objective(const std::vector<double>& distances, const std::vector<int>& labels,
                            const std::vector<double>& distr, int polarity, double threshold);

struct BoostedRound {
  MilWeakClassifier weak;
  double alpha = 0.0;          // vote weight
  double weighted_error = 0.0; // at selection time
};

struct AdaBoostEnsemble {
  std::vector<BoostedRound> rounds;
  bool stopped_early = false;
  uint64_t codebook_hash = 0;
  dsvm::WindowGrid grid;
  std::vector<double> distr_sums;  // sample-weight total after each round's renormalization
};

struct MilTrainConfig {
  int rounds = 31;
  int instance_budget = 500;  // pattern candidates drawn per round
  PerceptronConfig perceptron;
  uint64_t seed = 1;
};

// Discrete AdaBoost: each round draws pattern candidates from the pooled
// training-window histograms, pairs them with every grid window and both
// polarities, fits each threshold with the perceptron rule, and keeps the
// lowest weighted error. Stops early if no candidate beats error 0.5.
AdaBoostEnsemble adaboost_train(const std::vector<dsvm::SampleFeatures>& pos,
                                const std::vector<dsvm::SampleFeatures>& neg,
                                const dsvm::WindowGrid& grid, const features::Codebook& cb,
                                const MilTrainConfig& cfg = {});

// Sign of the weighted vote; a zero score counts as negative.
int adaboost_classify(const AdaBoostEnsemble& e, const dsvm::SampleFeatures& sample);

}  // namespace simglyph::mil
