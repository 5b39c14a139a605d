#include "simglyph/dsvm.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "simglyph/errors.hpp"
#include "simglyph/serialize.hpp"

namespace simglyph::dsvm {

std::vector<Rect> WindowGrid::enumerate() const {
  std::vector<Rect> out;
  for (const Scale& s : scales) {
    for (int y = 0; y + s.h <= image_size; y += stride) {
      for (int x = 0; x + s.w <= image_size; x += stride) {
        out.push_back(Rect{x, y, s.w, s.h});
      }
    }
  }
  return out;
}

std::string WindowGrid::spec_string() const {
  std::ostringstream ss;
  ss << "stride=" << stride << ";size=" << image_size << ";scales=";
  for (size_t i = 0; i < scales.size(); ++i) {
    if (i) ss << ",";
    ss << scales[i].w << "x" << scales[i].h;
  }
  return ss.str();
}

WindowGrid WindowGrid::parse_spec(const std::string& s) {
  WindowGrid g;
  g.scales.clear();
  std::istringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) {
    size_t eq = part.find('=');
    if (eq == std::string::npos) throw FormatError("grid spec: missing '=' in '" + part + "'");
    std::string key = part.substr(0, eq);
    std::string val = part.substr(eq + 1);
    if (key == "stride") {
      g.stride = std::stoi(val);
    } else if (key == "size") {
      g.image_size = std::stoi(val);
    } else if (key == "scales") {
      std::istringstream vs(val);
      std::string item;
      while (std::getline(vs, item, ',')) {
        size_t x = item.find('x');
        if (x == std::string::npos) throw FormatError("grid spec: bad scale '" + item + "'");
        g.scales.push_back(Scale{std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1))});
      }
    } else {
      throw FormatError("grid spec: unknown key '" + key + "'");
    }
  }
  if (g.scales.empty()) throw FormatError("grid spec: no scales");
  if (g.stride <= 0) throw FormatError("grid spec: stride must be positive");
  for (const Scale& sc : g.scales)
    if (sc.w <= 0 || sc.h <= 0 || sc.w > g.image_size || sc.h > g.image_size)
      throw FormatError("grid spec: scale does not fit the image");
  return g;
}

WindowGrid WindowGrid::default_grid() {
  WindowGrid g;
  g.scales = {{64, 24}, {24, 64}, {32, 32}, {16, 16}, {24, 24},
              {16, 48}, {48, 16}, {64, 32}, {32, 64}};
  g.stride = 4;
  g.image_size = imagecore::kNormalizedSize;
  return g;
}

SampleFeatures extract_sample_features(const imagecore::GlyphImage& img,
                                       const features::Codebook& cb,
                                       const std::vector<Rect>& windows,
                                       const features::GcParams& params) {
  const auto grad = imagecore::sobel(img);
  const auto seeds = imagecore::extract_seeds(img);
  const auto descriptors = features::all_descriptors(seeds, grad, params);
  const auto codes = features::assign_codewords(descriptors, cb);
  const auto ih =
      features::build_integral_histogram(seeds, codes, cb.size(), img.width, img.height);

  SampleFeatures f;
  f.dims = cb.size();
  f.data.reserve(windows.size() * static_cast<size_t>(f.dims));
  for (const Rect& w : windows) {
    const auto hist = features::window_feature(ih, w);
    for (int c : hist.counts) f.data.push_back(static_cast<double>(c));
  }
  return f;
}

void TrainConfig::validate() const {
  if (!(C > 0)) throw ConfigError("TrainConfig: C must be > 0");
  if (!(tau > 0)) throw ConfigError("TrainConfig: tau must be > 0");
  if (max_outer_iters < 1 || max_inner_iters < 1)
    throw ConfigError("TrainConfig: iteration limits must be >= 1");
  if (!(inner_rel_tol >= 0)) throw ConfigError("TrainConfig: inner_rel_tol must be >= 0");
}

namespace {

double dot(const double* row, const std::vector<double>& w) {
  double s = 0.0;
  for (size_t i = 0; i < w.size(); ++i) s += row[i] * w[i];
  return s;
}

}  // namespace

WindowScore most_violated(const Mu& mu, const SampleFeatures& sample) {
  if (sample.window_count() == 0) throw ConfigError("most_violated: sample has no windows");
  if (sample.dims != static_cast<int>(mu.w.size()))
    throw ConfigError("most_violated: dimension mismatch");
  WindowScore best{0, dot(sample.row(0), mu.w) + mu.b};
  for (int i = 1; i < sample.window_count(); ++i) {
    const double s = dot(sample.row(i), mu.w) + mu.b;
    if (s > best.score) best = {i, s};
  }
  return best;
}

double eval_objective(const Mu& mu, const std::vector<SampleFeatures>& pos,
                      const std::vector<SampleFeatures>& neg, double C) {
  double f = 0.0;
  for (double v : mu.w) f += v * v;
  f *= 0.5;

  double sum_g = 0.0;
  for (const auto& s : pos) {
    // min over windows of (-w.x - b) is the negated best score
    sum_g += std::max(-1.0, -most_violated(mu, s).score);
  }
  double sum_h = 0.0;
  for (const auto& s : neg) {
    sum_h += std::max(-1.0, most_violated(mu, s).score);
  }
  return f + C * sum_g + C * sum_h;
}

double gamma_value(const Mu& mu, const std::vector<FeatureVec>& positives,
                   const std::vector<SampleFeatures>& neg, double C) {
  double f = 0.0;
  for (double v : mu.w) f += v * v;
  f *= 0.5;

  double sum_pos = 0.0;
  for (const auto& x : positives) {
    const double score = dot(x.data(), mu.w) + mu.b;
    sum_pos += std::max(-1.0, -score);
  }
  double sum_neg = 0.0;
  for (const auto& s : neg) {
    sum_neg += std::max(-1.0, most_violated(mu, s).score);
  }
  return f + C * sum_pos + C * sum_neg;
}

Mu subgradient(const Mu& mu, const std::vector<FeatureVec>& positives,
               const std::vector<SampleFeatures>& neg, double C) {
  Mu g(mu.w.size());
  g.w = mu.w;  // regularizer gradient
  g.b = 0.0;

  for (const auto& x : positives) {
    const double score = dot(x.data(), mu.w) + mu.b;
    if (-score >= -1.0) {  // hinge active
      for (size_t i = 0; i < g.w.size(); ++i) g.w[i] -= C * x[i];
      g.b -= C;
    }
  }
  for (const auto& s : neg) {
    const WindowScore best = most_violated(mu, s);
    if (best.score >= -1.0) {
      const double* y = s.row(best.window);
      for (size_t i = 0; i < g.w.size(); ++i) g.w[i] += C * y[i];
      g.b += C;
    }
  }
  return g;
}

InnerResult inner_solve(const Mu& mu0, const std::vector<FeatureVec>& positives,
                        const std::vector<SampleFeatures>& neg, const TrainConfig& cfg) {
  cfg.validate();
  if (positives.empty()) throw ConfigError("inner_solve: no fixed positive windows");

  Mu mu = mu0;
  Mu best = mu0;
  double best_gamma = gamma_value(mu0, positives, neg, cfg.C);

  InnerResult res;
  res.gamma_trace.push_back(best_gamma);

  int streak = 0;
  for (int k = 1; k <= cfg.max_inner_iters; ++k) {
    const Mu g = subgradient(mu, positives, neg, cfg.C);
    // 1/k schedule along the normalized subgradient: raw codeword counts make
    // the raw subgradients enormous, and an unscaled step would strand the
    // iterate far from the minimizer.
    double g2 = g.b * g.b;
    for (double v : g.w) g2 += v * v;
    if (g2 == 0.0) break;  // stationary: nothing left to descend
    const double step = (1.0 / k) / std::sqrt(g2);
    for (size_t i = 0; i < mu.w.size(); ++i) mu.w[i] -= step * g.w[i];
    mu.b -= step * g.b;

    const double gamma = gamma_value(mu, positives, neg, cfg.C);
    res.gamma_trace.push_back(gamma);

    const double prev_best = best_gamma;
    if (gamma < best_gamma) {
      best_gamma = gamma;
      best = mu;
    }
    const double rel = (prev_best - best_gamma) / std::max(1.0, std::abs(best_gamma));
    if (rel < cfg.inner_rel_tol) {
      if (++streak >= cfg.inner_patience) break;
    } else {
      streak = 0;
    }
  }
  res.mu = best;
  return res;
}

TrainResult train(const std::vector<SampleFeatures>& pos, const std::vector<SampleFeatures>& neg,
                  const TrainConfig& cfg, const WindowGrid& grid, const features::Codebook& cb) {
  cfg.validate();
  if (pos.empty() || neg.empty())
    throw InsufficientDataError("train: both classes need at least one sample");
  const int dims = cb.size();
  for (const auto& s : pos)
    if (s.dims != dims) throw ConfigError("train: positive sample dims mismatch");
  for (const auto& s : neg)
    if (s.dims != dims) throw ConfigError("train: negative sample dims mismatch");

  // The listing leaves the starting model open, and the zero model is a
  // degenerate choice: every window ties, the first window of each sample
  // becomes its witness, and the loop can stall on those picks. Start from
  // the unit mean-difference of the class feature rows so the first witness
  // selection is already class-informed.
  Mu mu(dims);
  {
    std::vector<double> diff(dims, 0.0);
    auto accumulate = [&](const std::vector<SampleFeatures>& set, double sign) {
      long long rows = 0;
      for (const auto& s : set) rows += s.window_count();
      if (rows == 0) throw ConfigError("train: samples carry no windows");
      for (const auto& s : set)
        for (size_t i = 0; i < s.data.size(); ++i)
          diff[i % dims] += sign * s.data[i] / static_cast<double>(rows);
    };
    accumulate(pos, 1.0);
    accumulate(neg, -1.0);
    double norm = 0.0;
    for (double v : diff) norm += v * v;
    norm = std::sqrt(norm);
    // Tiny magnitude: enough to order windows, small enough that the first
    // total-violation measurement still sees unmet margins.
    if (norm > 0.0)
      for (int i = 0; i < dims; ++i) mu.w[i] = 1e-3 * diff[i] / norm;
  }

  std::vector<FeatureVec> cache;
  std::set<FeatureVec> cache_set;
  TrainResult res;

  for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
    // Fresh witness per positive sample under the current model. The inner
    // problem fixes exactly these picks (one hinge per sample): minimizing
    // over the whole accumulated cache can trade a fresh-pick term against
    // stale ones and push the recorded objective back up, while with the
    // per-round picks the warm-started best-so-far solve makes obj(k)
    // non-increasing whatever the solver accuracy.
    double tv = 0.0;
    std::vector<FeatureVec> picks;
    picks.reserve(pos.size());
    for (const auto& s : pos) {
      const WindowScore bw = most_violated(mu, s);
      tv += std::max(0.0, 1.0 - bw.score);
      FeatureVec x = s.row_vec(bw.window);
      if (cache_set.insert(x).second) cache.push_back(x);
      picks.push_back(std::move(x));
    }

    InnerResult inner = inner_solve(mu, picks, neg, cfg);
    mu = inner.mu;

    OuterTraceRow row;
    // Slack form of the objective: shifting each hinge term by +1 turns it
    // into the per-sample slack, which keeps the trace nonnegative.
    row.obj = eval_objective(mu, pos, neg, cfg.C) + cfg.C * (pos.size() + neg.size());
    row.tv = tv;
    row.cache_size = static_cast<int>(cache.size());
    row.inner_gamma = std::move(inner.gamma_trace);
    res.trace.outer.push_back(std::move(row));

    if (tv < cfg.tau) break;
  }

  res.model.w = mu.w;
  res.model.b = mu.b;
  res.model.grid = grid;
  res.model.codebook_hash = serialize::codebook_hash(cb);
  res.model.C = cfg.C;
  res.model.tau = cfg.tau;
  return res;
}

Prediction predict(const SvmModel& model, const SampleFeatures& sample) {
  const auto rects = model.grid.enumerate();
  if (sample.window_count() != static_cast<int>(rects.size()))
    throw ConfigError("predict: sample windows do not match the model grid");
  const Mu mu{model.w, model.b};
  const WindowScore best = most_violated(mu, sample);
  Prediction p;
  p.window_index = best.window;
  p.window = rects[best.window];
  p.score = best.score;
  p.label = (best.score > 0.0) ? 1 : -1;
  return p;
}

}  // namespace simglyph::dsvm
