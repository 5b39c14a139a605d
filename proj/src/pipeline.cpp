#include "simglyph/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "simglyph/errors.hpp"

namespace simglyph::pipeline {

namespace {

double sigmoid(double z) {
  z = std::clamp(z, -40.0, 40.0);
  const double h = 1.0 / (1.0 + std::exp(-z));
  // confidence stays strictly inside (0,1) even where exp saturates
  return std::clamp(h, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

}  // namespace

double gate_confidence(const ConfidenceGate& gate, double s1, double s2) {
  return sigmoid(gate.theta[0] + gate.theta[1] * s1 + gate.theta[2] * s2);
}

double gate_log_likelihood(const std::array<double, 3>& theta,
                           const std::vector<GateSample>& samples) {
  double ll = 0.0;
  for (const auto& s : samples) {
    const double h = sigmoid(theta[0] + theta[1] * s.s1 + theta[2] * s.s2);
    const double p = s.y ? h : 1.0 - h;
    ll += std::log(std::max(p, 1e-300));
  }
  return ll / static_cast<double>(samples.size());
}

std::array<double, 3> train_gate(const std::vector<GateSample>& samples,
                                 const GateTrainConfig& cfg) {
  if (samples.empty()) throw DegenerateLabelsError("train_gate: no samples");
  bool has0 = false, has1 = false;
  for (const auto& s : samples) (s.y ? has1 : has0) = true;
  if (!has0 || !has1) throw DegenerateLabelsError("train_gate: both labels required");

  std::array<double, 3> theta{0.0, 0.0, 0.0};
  std::array<double, 3> best = theta;
  double best_ll = gate_log_likelihood(theta, samples);

  const double n = static_cast<double>(samples.size());
  for (int it = 0; it < cfg.iterations; ++it) {
    std::array<double, 3> grad{0.0, 0.0, 0.0};
    for (const auto& s : samples) {
      const double h = sigmoid(theta[0] + theta[1] * s.s1 + theta[2] * s.s2);
      const double r = s.y - h;
      grad[0] += r;
      grad[1] += r * s.s1;
      grad[2] += r * s.s2;
    }
    for (int j = 0; j < 3; ++j) theta[j] += cfg.learning_rate * grad[j] / n;

    const double ll = gate_log_likelihood(theta, samples);
    if (ll > best_ll) {
      best_ll = ll;
      best = theta;
    }
  }
  return best;
}

const SimilarPair* SimilarPairTable::find(int x, int y) const {
  const int a = std::min(x, y), b = std::max(x, y);
  for (const auto& p : pairs)
    if (p.a == a && p.b == b) return &p;
  return nullptr;
}

SimilarPairTable mine_pairs(const std::vector<std::pair<int, int>>& confusion_log, int threshold) {
  if (threshold < 1) throw ConfigError("mine_pairs: threshold must be >= 1");
  std::map<std::pair<int, int>, int> counts;
  for (const auto& [truth, predicted] : confusion_log) {
    if (truth == predicted) continue;
    counts[{std::min(truth, predicted), std::max(truth, predicted)}] += 1;
  }
  SimilarPairTable table;
  for (const auto& [key, count] : counts) {
    if (count > threshold) {
      table.pairs.push_back(SimilarPair{key.first, key.second, count, key.first, {}});
    }
  }
  return table;
}

std::vector<double> downsample_vector(const imagecore::GlyphImage& img, int grid) {
  std::vector<double> v(static_cast<size_t>(grid) * grid, 0.0);
  for (int gy = 0; gy < grid; ++gy) {
    const int y0 = gy * img.height / grid;
    const int y1 = (gy + 1) * img.height / grid;
    for (int gx = 0; gx < grid; ++gx) {
      const int x0 = gx * img.width / grid;
      const int x1 = (gx + 1) * img.width / grid;
      double sum = 0.0;
      int n = 0;
      for (int y = y0; y < std::max(y1, y0 + 1); ++y) {
        for (int x = x0; x < std::max(x1, x0 + 1); ++x) {
          if (y < img.height && x < img.width) {
            sum += img.at(x, y);
            ++n;
          }
        }
      }
      v[static_cast<size_t>(gy) * grid + gx] = n ? sum / n : 0.0;
    }
  }
  return v;
}

NearestCentroidBaseline train_baseline(
    const std::vector<std::pair<int, imagecore::GlyphImage>>& samples, int grid,
    double shrinkage) {
  if (samples.empty()) throw InsufficientDataError("train_baseline: no samples");
  NearestCentroidBaseline model;
  model.grid = grid;
  model.shrinkage = shrinkage;

  const size_t dims = static_cast<size_t>(grid) * grid;
  std::map<int, std::pair<std::vector<double>, int>> sums;
  std::vector<double> global(dims, 0.0);
  for (const auto& [cls, img] : samples) {
    auto v = downsample_vector(img, grid);
    auto& [sum, n] = sums[cls];
    if (sum.empty()) sum.assign(dims, 0.0);
    for (size_t i = 0; i < dims; ++i) {
      sum[i] += v[i];
      global[i] += v[i];
    }
    ++n;
  }
  for (double& g : global) g /= static_cast<double>(samples.size());

  for (const auto& [cls, acc] : sums) {
    const auto& [sum, n] = acc;
    std::vector<double> centroid(dims);
    for (size_t i = 0; i < dims; ++i)
      centroid[i] = (sum[i] + shrinkage * global[i]) / (n + shrinkage);
    model.class_ids.push_back(cls);
    model.centroids.push_back(std::move(centroid));
  }
  return model;
}

bool NearestCentroidBaseline::has_class(int id) const {
  return std::binary_search(class_ids.begin(), class_ids.end(), id);
}

BaselineOutput baseline_score(const NearestCentroidBaseline& model,
                              const imagecore::GlyphImage& img) {
  if (model.class_ids.size() < 2)
    throw ConfigError("baseline_score: at least two trained classes required");
  const auto v = downsample_vector(img, model.grid);

  int best1 = -1, best2 = -1;
  double s1 = 0.0, s2 = 0.0;
  for (size_t c = 0; c < model.class_ids.size(); ++c) {
    double d2 = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      const double d = v[i] - model.centroids[c][i];
      d2 += d * d;
    }
    const double score = -std::sqrt(d2);
    // strict > keeps the earlier (lower) class id on ties
    if (best1 < 0 || score > s1) {
      best2 = best1;
      s2 = s1;
      best1 = static_cast<int>(c);
      s1 = score;
    } else if (best2 < 0 || score > s2) {
      best2 = static_cast<int>(c);
      s2 = score;
    }
  }
  return BaselineOutput{model.class_ids[best1], model.class_ids[best2], s1, s2};
}

ScoredSample score_sample(const RecognitionSystem& sys, const imagecore::GlyphImage& img) {
  return score_sample(sys, img, baseline_score(sys.baseline, img));
}

ScoredSample score_sample(const RecognitionSystem& sys, const imagecore::GlyphImage& img,
                          const BaselineOutput& top2) {
  if (top2.c1 == top2.c2 || top2.s1 < top2.s2)
    throw ConfigError("score_sample: malformed first-stage output");
  ScoredSample s;
  s.top2 = top2;
  s.confidence = gate_confidence(sys.gate, s.top2.s1, s.top2.s2);

  const SimilarPair* pair = sys.table.find(s.top2.c1, s.top2.c2);
  if (!pair) return s;
  auto it = sys.pair_models.find({pair->a, pair->b});
  if (it == sys.pair_models.end())
    throw ConfigError("recognize: pair (" + std::to_string(pair->a) + "," +
                      std::to_string(pair->b) + ") has no trained model");
  const PairClassifier& pc = it->second;
  const auto windows = pc.model.grid.enumerate();
  const auto feats = dsvm::extract_sample_features(img, pc.codebook, windows);
  const auto pred = dsvm::predict(pc.model, feats);
  const int other = (pc.positive_class == pair->a) ? pair->b : pair->a;
  s.pair_in_table = true;
  s.svm_class = (pred.label > 0) ? pc.positive_class : other;
  s.window = pred.window;
  return s;
}

RecognitionResult decide(const ScoredSample& scored, double sigma) {
  RecognitionResult r;
  r.top2 = scored.top2;
  r.confidence = scored.confidence;
  if (scored.confidence >= sigma) {
    r.class_id = scored.top2.c1;
    r.route = Route::kBaseline;
  } else if (scored.pair_in_table) {
    r.class_id = scored.svm_class;
    r.route = Route::kSvm;
    r.window = scored.window;
  } else {
    r.class_id = scored.top2.c1;
    r.route = Route::kBaselineFallback;
  }
  return r;
}

RecognitionResult recognize(const RecognitionSystem& sys, const imagecore::GlyphImage& img) {
  return decide(score_sample(sys, img), sys.gate.sigma);
}

}  // namespace simglyph::pipeline
