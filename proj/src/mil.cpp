#include "simglyph/mil.hpp"

#include <algorithm>
#include <cmath>

#include "simglyph/errors.hpp"
#include "simglyph/rng.hpp"
#include "simglyph/serialize.hpp"

namespace simglyph::mil {

double window_distance(const std::vector<int>& pattern, const dsvm::SampleFeatures& sample,
                       int window_index) {
  if (static_cast<int>(pattern.size()) != sample.dims)
    throw ConfigError("window_distance: dimension mismatch");
  const double* row = sample.row(window_index);
  double d2 = 0.0;
  for (size_t i = 0; i < pattern.size(); ++i) {
    const double d = row[i] - pattern[i];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

int weak_classify(const MilWeakClassifier& w, const dsvm::SampleFeatures& sample) {
  const double d = window_distance(w.pattern, sample, w.window_index);
  return (d * w.polarity < w.threshold * w.polarity) ? 1 : -1;
}

double perceptron_threshold(const std::vector<double>& distances, const std::vector<int>& labels,
                            const std::vector<double>& distr, int polarity,
                            const PerceptronConfig& cfg) {
  if (distances.size() != labels.size() || distances.size() != distr.size())
    throw ConfigError("perceptron_threshold: input sizes differ");
  double t = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i = 0; i < distances.size(); ++i) {
      const int yhat = (distances[i] * polarity < t * polarity) ? 1 : -1;
      t += distr[i] * cfg.alpha * (labels[i] - yhat);
    }
  }
  return t;
}

double perceptron_objective(const std::vector<double>& distances, const std::vector<int>& labels,
                            const std::vector<double>& distr, int polarity, double threshold) {
  double f = 0.0;
  for (size_t i = 0; i < distances.size(); ++i) {
    const int yhat = (distances[i] * polarity < threshold * polarity) ? 1 : -1;
    if (yhat != labels[i]) f -= distr[i] * labels[i] * threshold;
  }
  return f;
}

namespace {

struct Candidate {
  const dsvm::SampleFeatures* source = nullptr;
  int source_window = -1;
};

}  // namespace

AdaBoostEnsemble adaboost_train(const std::vector<dsvm::SampleFeatures>& pos,
                                const std::vector<dsvm::SampleFeatures>& neg,
                                const dsvm::WindowGrid& grid, const features::Codebook& cb,
                                const MilTrainConfig& cfg) {
  if (pos.empty() || neg.empty())
    throw InsufficientDataError("adaboost_train: both classes need at least one sample");
  if (cfg.rounds < 1 || cfg.instance_budget < 1)
    throw ConfigError("adaboost_train: rounds and instance_budget must be >= 1");

  const auto rects = grid.enumerate();
  const int num_windows = static_cast<int>(rects.size());
  const int dims = cb.size();

  std::vector<const dsvm::SampleFeatures*> all;
  std::vector<int> labels;
  for (const auto& s : pos) {
    all.push_back(&s);
    labels.push_back(1);
  }
  for (const auto& s : neg) {
    all.push_back(&s);
    labels.push_back(-1);
  }
  const size_t n = all.size();
  for (const auto* s : all)
    if (s->dims != dims || s->window_count() != num_windows)
      throw ConfigError("adaboost_train: sample features do not match grid/codebook");

  std::vector<double> distr(n, 1.0 / static_cast<double>(n));
  Rng rng(cfg.seed);

  AdaBoostEnsemble ensemble;
  ensemble.grid = grid;
  ensemble.codebook_hash = serialize::codebook_hash(cb);

  std::vector<double> distances(n);
  std::vector<int> pattern(dims);

  for (int round = 0; round < cfg.rounds; ++round) {
    // Uniform seeded subsample of the (sample, window) histogram pool.
    const size_t pool = n * static_cast<size_t>(num_windows);
    const size_t budget = std::min<size_t>(cfg.instance_budget, pool);
    std::vector<size_t> picks(budget);
    for (size_t i = 0; i < budget; ++i) picks[i] = rng.index(pool);

    bool have_best = false;
    MilWeakClassifier best_weak;
    double best_err = 1.0;

    for (size_t pick : picks) {
      const dsvm::SampleFeatures& src = *all[pick / num_windows];
      const int src_window = static_cast<int>(pick % num_windows);
      const double* row = src.row(src_window);
      for (int i = 0; i < dims; ++i) pattern[i] = static_cast<int>(row[i]);

      for (int b = 0; b < num_windows; ++b) {
        for (size_t i = 0; i < n; ++i) {
          const double* r = all[i]->row(b);
          double d2 = 0.0;
          for (int c = 0; c < dims; ++c) {
            const double d = r[c] - pattern[c];
            d2 += d * d;
          }
          distances[i] = std::sqrt(d2);
        }
        for (int polarity : {1, -1}) {
          const double t = perceptron_threshold(distances, labels, distr, polarity, cfg.perceptron);
          double err = 0.0;
          for (size_t i = 0; i < n; ++i) {
            const int yhat = (distances[i] * polarity < t * polarity) ? 1 : -1;
            if (yhat != labels[i]) err += distr[i];
          }
          if (!have_best || err < best_err) {
            have_best = true;
            best_err = err;
            best_weak.pattern = pattern;
            best_weak.window_index = b;
            best_weak.window = rects[b];
            best_weak.polarity = polarity;
            best_weak.threshold = t;
          }
        }
      }
    }

    if (!have_best || best_err >= 0.5) {
      ensemble.stopped_early = true;
      break;
    }

    const double eps = std::max(best_err, 1e-10);
    const double alpha = 0.5 * std::log((1.0 - eps) / eps);

    double z = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const int yhat = (window_distance(best_weak.pattern, *all[i], best_weak.window_index) *
                            best_weak.polarity <
                        best_weak.threshold * best_weak.polarity)
                           ? 1
                           : -1;
      distr[i] *= std::exp(-alpha * labels[i] * yhat);
      z += distr[i];
    }
    for (double& d : distr) d /= z;
    double total = 0.0;
    for (double d : distr) total += d;
    ensemble.distr_sums.push_back(total);

    ensemble.rounds.push_back(BoostedRound{best_weak, alpha, best_err});
  }
  return ensemble;
}

int adaboost_classify(const AdaBoostEnsemble& e, const dsvm::SampleFeatures& sample) {
  double score = 0.0;
  for (const auto& r : e.rounds) score += r.alpha * weak_classify(r.weak, sample);
  return (score > 0.0) ? 1 : -1;
}

}  // namespace simglyph::mil
