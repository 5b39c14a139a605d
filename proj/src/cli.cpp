#include "simglyph/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "simglyph/dsvm.hpp"
#include "simglyph/errors.hpp"
#include "simglyph/features.hpp"
#include "simglyph/mil.hpp"
#include "simglyph/pipeline.hpp"
#include "simglyph/serialize.hpp"
#include "simglyph/synthdata.hpp"
#include "simglyph/textio.hpp"

namespace simglyph::cli {

namespace fs = std::filesystem;
using textio::fmt_g9;

namespace {

std::string pad3(int v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", v);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_run_config(CLI::App& app, const fs::path& outdir) {
  ensure_dir(outdir);
  textio::write_file_atomic(outdir / "run_config.txt", app.config_to_str(true, true));
}

imagecore::GlyphImage normalized(const imagecore::GlyphImage& img) {
  if (img.width == imagecore::kNormalizedSize && img.height == imagecore::kNormalizedSize)
    return img;
  return imagecore::normalize(img);
}

struct LabeledSample {
  int class_id;
  imagecore::GlyphImage image;
  Rect truth;
  fs::path file;

  bool has_truth() const { return truth.w > 0 && truth.h > 0; }
};

std::vector<LabeledSample> load_dataset(const std::vector<fs::path>& manifests) {
  std::vector<LabeledSample> out;
  for (const auto& m : manifests) {
    for (const auto& e : read_manifest(m)) {
      out.push_back(LabeledSample{e.class_id, normalized(load_sample(e.file)), e.truth, e.file});
    }
  }
  if (out.empty()) throw ConfigError("dataset is empty");
  return out;
}

std::vector<int> class_list(const std::vector<LabeledSample>& ds) {
  std::set<int> ids;
  for (const auto& s : ds) ids.insert(s.class_id);
  return {ids.begin(), ids.end()};
}

features::Codebook build_codebook_for(const std::vector<LabeledSample>& ds, int k,
                                      int min_cluster_size, uint64_t seed) {
  std::vector<features::GcDescriptor> pool;
  for (const auto& s : ds) {
    const auto grad = imagecore::sobel(s.image);
    const auto seeds = imagecore::extract_seeds(s.image);
    auto d = features::all_descriptors(seeds, grad);
    pool.insert(pool.end(), d.begin(), d.end());
  }
  if (min_cluster_size <= 0) min_cluster_size = features::default_min_cluster_size(pool.size());
  k = std::min<size_t>(k, pool.size());
  return features::build_codebook(pool, k, min_cluster_size, seed);
}

struct PairFeatureSet {
  int positive_class = -1;
  int negative_class = -1;
  std::vector<dsvm::SampleFeatures> pos, neg;
  std::vector<const LabeledSample*> pos_src, neg_src;
};

PairFeatureSet extract_pair_features(const std::vector<LabeledSample>& ds,
                                     const features::Codebook& cb, const dsvm::WindowGrid& grid,
                                     int positive_class) {
  const auto ids = class_list(ds);
  if (ids.size() != 2)
    throw ConfigError("pair dataset must contain exactly 2 classes, found " +
                      std::to_string(ids.size()));
  PairFeatureSet fs;
  fs.positive_class = (positive_class >= 0) ? positive_class : ids[0];
  if (fs.positive_class != ids[0] && fs.positive_class != ids[1])
    throw ConfigError("positive class " + std::to_string(fs.positive_class) +
                      " is not in the dataset");
  fs.negative_class = (fs.positive_class == ids[0]) ? ids[1] : ids[0];

  const auto rects = grid.enumerate();
  for (const auto& s : ds) {
    auto feats = dsvm::extract_sample_features(s.image, cb, rects);
    if (s.class_id == fs.positive_class) {
      fs.pos.push_back(std::move(feats));
      fs.pos_src.push_back(&s);
    } else {
      fs.neg.push_back(std::move(feats));
      fs.neg_src.push_back(&s);
    }
  }
  return fs;
}

// ---- gen ----

void cmd_gen(const fs::path& spec_path, const fs::path& outdir, int samples_override,
             int jitter_override, int64_t seed_override, int train_count, std::ostream& out) {
  auto spec = synthdata::PairSpec::parse_text(textio::read_file(spec_path));
  if (samples_override > 0) spec.samples_per_class = samples_override;
  if (jitter_override >= 0) spec.jitter = jitter_override;
  if (seed_override >= 0) spec.seed = static_cast<uint64_t>(seed_override);
  spec.validate();

  const auto ds = synthdata::generate_pair(spec);
  ensure_dir(outdir);

  std::vector<textio::CsvRow> manifest{{"class_id", "file", "gt_x", "gt_y", "gt_w", "gt_h"}};
  auto add_row = [&](int cls, const std::string& name, const Rect* truth) {
    manifest.push_back({std::to_string(cls), name, std::to_string(truth ? truth->x : -1),
                        std::to_string(truth ? truth->y : -1), std::to_string(truth ? truth->w : -1),
                        std::to_string(truth ? truth->h : -1)});
  };
  for (size_t i = 0; i < ds.negatives.size(); ++i) {
    const std::string name = "neg_" + pad3(static_cast<int>(i)) + ".pgm";
    textio::write_pgm(outdir / name, ds.negatives[i]);
    add_row(spec.class_negative, name, nullptr);
  }
  for (size_t i = 0; i < ds.positives.size(); ++i) {
    const std::string name = "pos_" + pad3(static_cast<int>(i)) + ".pgm";
    textio::write_pgm(outdir / name, ds.positives[i]);
    add_row(spec.class_positive, name, &ds.truth[i]);
  }
  textio::write_csv(outdir / "manifest.csv", manifest);

  if (train_count > 0) {
    if (train_count >= spec.samples_per_class)
      throw ConfigError("--train-count must be below samples_per_class");
    std::vector<textio::CsvRow> train{manifest[0]}, test{manifest[0]};
    // rows: negatives first, then positives, in generation order
    for (int i = 0; i < spec.samples_per_class; ++i) {
      auto& dst = (i < train_count) ? train : test;
      dst.push_back(manifest[1 + i]);                           // negative i
      dst.push_back(manifest[1 + spec.samples_per_class + i]);  // positive i
    }
    textio::write_csv(outdir / "train_manifest.csv", train);
    textio::write_csv(outdir / "test_manifest.csv", test);
  }
  out << "generated " << ds.negatives.size() << "+" << ds.positives.size() << " samples in "
      << outdir.string() << "\n";
}

// ---- train-pair ----

void cmd_train_pair(const std::vector<fs::path>& manifests, const fs::path& outdir, double C,
                    double tau, int max_outer, int max_inner, double inner_tol, int k,
                    int min_cluster_size, const std::string& grid_spec, int positive_class,
                    uint64_t seed, std::ostream& out) {
  const auto ds = load_dataset(manifests);
  const auto grid = grid_spec.empty() ? dsvm::WindowGrid::default_grid()
                                      : dsvm::WindowGrid::parse_spec(grid_spec);

  const auto cb = build_codebook_for(ds, k, min_cluster_size, seed);
  const auto feats = extract_pair_features(ds, cb, grid, positive_class);

  dsvm::TrainConfig cfg;
  cfg.C = C;
  cfg.tau = tau;
  cfg.max_outer_iters = max_outer;
  cfg.max_inner_iters = max_inner;
  cfg.inner_rel_tol = inner_tol;

  const auto result = dsvm::train(feats.pos, feats.neg, cfg, grid, cb);

  ensure_dir(outdir);
  serialize::save_text(outdir / "codebook.txt", serialize::codebook_text(cb));
  serialize::save_text(outdir / "model.txt", serialize::model_text(result.model));

  std::vector<textio::CsvRow> trace{{"iter", "obj", "tv", "cache_size"}};
  for (size_t i = 0; i < result.trace.outer.size(); ++i) {
    const auto& row = result.trace.outer[i];
    trace.push_back({std::to_string(i + 1), fmt_g9(row.obj), fmt_g9(row.tv),
                     std::to_string(row.cache_size)});
  }
  textio::write_csv(outdir / "trace.csv", trace);

  out << "trained pair (" << feats.positive_class << " positive, " << feats.negative_class
      << " negative): " << result.trace.outer.size() << " outer iterations, final obj "
      << fmt_g9(result.trace.outer.back().obj) << "\n";
}

// ---- train-gate ----

void cmd_train_gate(const std::vector<fs::path>& train_manifests,
                    const std::vector<fs::path>& gate_manifests, const fs::path& outdir,
                    double sigma, double rate, int iters, std::ostream& out) {
  if (sigma < 0.0 || sigma > 1.0) throw ConfigError("--sigma must lie in [0, 1]");
  const auto train_ds = load_dataset(train_manifests);
  std::vector<std::pair<int, imagecore::GlyphImage>> labeled;
  for (const auto& s : train_ds) labeled.push_back({s.class_id, s.image});
  const auto baseline = pipeline::train_baseline(labeled);

  const auto gate_ds = load_dataset(gate_manifests);
  std::vector<pipeline::GateSample> samples;
  for (const auto& s : gate_ds) {
    if (!baseline.has_class(s.class_id))
      throw ConfigError("gate sample class " + std::to_string(s.class_id) +
                        " unseen by the baseline");
    const auto top2 = pipeline::baseline_score(baseline, s.image);
    samples.push_back({top2.s1, top2.s2, top2.c1 == s.class_id ? 1 : 0});
  }

  pipeline::GateTrainConfig cfg;
  cfg.learning_rate = rate;
  cfg.iterations = iters;
  pipeline::ConfidenceGate gate;
  gate.theta = pipeline::train_gate(samples, cfg);
  gate.sigma = sigma;

  ensure_dir(outdir);
  serialize::save_text(outdir / "gate.txt", serialize::gate_text(gate));
  serialize::save_text(outdir / "baseline.txt", serialize::baseline_text(baseline));
  out << "gate trained on " << samples.size() << " scored samples; sigma " << fmt_g9(sigma)
      << "\n";
}

// ---- mine-pairs ----

void cmd_mine_pairs(const fs::path& log_path, int threshold, const fs::path& outdir,
                    std::ostream& out) {
  const auto rows = textio::read_csv(log_path);
  std::vector<std::pair<int, int>> log;
  for (const auto& row : rows) {
    if (row.size() < 2) throw FormatError("confusion log rows need true_id,predicted_id");
    if (!row[0].empty() && !std::isdigit(static_cast<unsigned char>(row[0][0])) &&
        row[0][0] != '-')
      continue;  // header
    log.push_back({std::stoi(row[0]), std::stoi(row[1])});
  }
  const auto table = pipeline::mine_pairs(log, threshold);
  ensure_dir(outdir);
  serialize::save_text(outdir / "pairs.txt", serialize::table_text(table));
  out << "mined " << table.pairs.size() << " similar pairs from " << log.size()
      << " log entries (threshold " << threshold << ")\n";
}

// ---- eval ----

struct LoadedPairModel {
  features::Codebook codebook;
  dsvm::SvmModel model;
};

LoadedPairModel load_pair_model(const fs::path& model_path, const fs::path& codebook_path) {
  LoadedPairModel lm;
  lm.codebook = serialize::load_codebook(codebook_path);
  lm.model = serialize::load_model(model_path);
  if (serialize::codebook_hash(lm.codebook) != lm.model.codebook_hash)
    throw ConfigError("model " + model_path.string() + " was trained with a different codebook");
  return lm;
}

void cmd_eval_pair(const std::vector<fs::path>& manifests, const fs::path& model_path,
                   const fs::path& codebook_path, const fs::path& outdir, int positive_class,
                   std::ostream& out) {
  const auto lm = load_pair_model(model_path, codebook_path);
  const auto ds = load_dataset(manifests);
  const auto ids = class_list(ds);
  if (ids.size() != 2) throw ConfigError("pair eval needs a 2-class dataset");
  const int pos_cls = (positive_class >= 0) ? positive_class : ids[0];
  const int neg_cls = (pos_cls == ids[0]) ? ids[1] : ids[0];

  const auto rects = lm.model.grid.enumerate();
  std::vector<textio::CsvRow> pred_rows{
      {"file", "true_class", "predicted_class", "score", "x", "y", "w", "h", "iou"}};
  int correct = 0, iou_n = 0;
  double iou_sum = 0.0;
  for (const auto& s : ds) {
    const auto feats = dsvm::extract_sample_features(s.image, lm.codebook, rects);
    const auto p = dsvm::predict(lm.model, feats);
    const int predicted = p.label > 0 ? pos_cls : neg_cls;
    const bool ok = predicted == s.class_id;
    correct += ok;
    std::string iou_str = "-";
    if (ok && s.class_id == pos_cls && s.has_truth()) {
      const double iou = rect_iou(p.window, s.truth);
      iou_sum += iou;
      ++iou_n;
      iou_str = fmt_g9(iou);
    }
    pred_rows.push_back({s.file.filename().string(), std::to_string(s.class_id),
                         std::to_string(predicted), fmt_g9(p.score), std::to_string(p.window.x),
                         std::to_string(p.window.y), std::to_string(p.window.w),
                         std::to_string(p.window.h), iou_str});
  }
  ensure_dir(outdir);
  textio::write_csv(outdir / "predictions.csv", pred_rows);
  const double acc = static_cast<double>(correct) / ds.size();
  const double mean_iou = iou_n ? iou_sum / iou_n : 0.0;
  textio::write_csv(outdir / "pair_report.csv",
                    {{"n_test", "accuracy", "mean_iou", "n_iou"},
                     {std::to_string(ds.size()), fmt_g9(acc), fmt_g9(mean_iou),
                      std::to_string(iou_n)}});
  out << "pair accuracy " << fmt_g9(acc) << " over " << ds.size() << " samples; mean IoU "
      << fmt_g9(mean_iou) << " over " << iou_n << " localized positives\n";
}

std::vector<double> parse_sweep(const std::string& sweep) {
  std::vector<double> out;
  std::istringstream ss(sweep);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw ConfigError("empty sigma sweep");
  return out;
}

void cmd_eval_system(const std::vector<fs::path>& manifests, const fs::path& baseline_path,
                     const fs::path& gate_path, const fs::path& table_path,
                     const fs::path& models_dir, const std::string& sweep, const fs::path& outdir,
                     std::ostream& out) {
  pipeline::RecognitionSystem sys;
  sys.baseline = serialize::load_baseline(baseline_path);
  sys.gate = serialize::load_gate(gate_path);
  sys.table = serialize::load_table(table_path);
  for (const auto& p : sys.table.pairs) {
    const fs::path dir = p.model_ref.empty()
                             ? models_dir / ("pair_" + std::to_string(p.a) + "_" +
                                             std::to_string(p.b))
                             : models_dir / p.model_ref;
    if (!fs::exists(dir / "model.txt"))
      throw ConfigError("pair (" + std::to_string(p.a) + "," + std::to_string(p.b) +
                        "): no model at " + (dir / "model.txt").string());
    auto lm = load_pair_model(dir / "model.txt", dir / "codebook.txt");
    pipeline::PairClassifier pc;
    pc.class_a = p.a;
    pc.class_b = p.b;
    pc.positive_class = p.positive_class;
    pc.codebook = std::move(lm.codebook);
    pc.model = std::move(lm.model);
    sys.pair_models[{p.a, p.b}] = std::move(pc);
  }

  const auto ds = load_dataset(manifests);
  for (const auto& s : ds)
    if (!sys.baseline.has_class(s.class_id))
      throw ConfigError("test class " + std::to_string(s.class_id) + " unseen by the baseline");

  std::vector<pipeline::ScoredSample> scored;
  scored.reserve(ds.size());
  for (const auto& s : ds) scored.push_back(pipeline::score_sample(sys, s.image));

  std::vector<textio::CsvRow> report{
      {"sigma", "accuracy", "n_baseline", "n_svm", "n_fallback"}};
  for (double sigma : parse_sweep(sweep)) {
    int correct = 0, n_base = 0, n_svm = 0, n_fb = 0;
    for (size_t i = 0; i < ds.size(); ++i) {
      const auto r = pipeline::decide(scored[i], sigma);
      correct += (r.class_id == ds[i].class_id);
      switch (r.route) {
        case pipeline::Route::kBaseline: ++n_base; break;
        case pipeline::Route::kSvm: ++n_svm; break;
        case pipeline::Route::kBaselineFallback: ++n_fb; break;
      }
    }
    report.push_back({fmt_g9(sigma), fmt_g9(static_cast<double>(correct) / ds.size()),
                      std::to_string(n_base), std::to_string(n_svm), std::to_string(n_fb)});
  }
  ensure_dir(outdir);
  textio::write_csv(outdir / "report.csv", report);

  // Head-to-head per-pair accuracy and localization of the pair models.
  std::vector<textio::CsvRow> pair_rows{
      {"class_a", "class_b", "n_test", "accuracy", "mean_iou", "n_iou"}};
  for (const auto& p : sys.table.pairs) {
    const auto& pc = sys.pair_models.at({p.a, p.b});
    const auto rects = pc.model.grid.enumerate();
    int n = 0, correct = 0, iou_n = 0;
    double iou_sum = 0.0;
    for (const auto& s : ds) {
      if (s.class_id != p.a && s.class_id != p.b) continue;
      ++n;
      const auto feats = dsvm::extract_sample_features(s.image, pc.codebook, rects);
      const auto pred = dsvm::predict(pc.model, feats);
      const int other = (pc.positive_class == p.a) ? p.b : p.a;
      const int predicted = pred.label > 0 ? pc.positive_class : other;
      const bool ok = predicted == s.class_id;
      correct += ok;
      if (ok && s.class_id == pc.positive_class && s.has_truth()) {
        iou_sum += rect_iou(pred.window, s.truth);
        ++iou_n;
      }
    }
    pair_rows.push_back({std::to_string(p.a), std::to_string(p.b), std::to_string(n),
                         n ? fmt_g9(static_cast<double>(correct) / n) : "-",
                         iou_n ? fmt_g9(iou_sum / iou_n) : "-", std::to_string(iou_n)});
  }
  textio::write_csv(outdir / "pairs_report.csv", pair_rows);
  out << "evaluated " << ds.size() << " samples over " << (report.size() - 1)
      << " sigma values; reports in " << outdir.string() << "\n";
}

// ---- localize ----

void cmd_localize(const std::vector<fs::path>& manifests, const fs::path& model_path,
                  const fs::path& codebook_path, const fs::path& outdir, int positive_class,
                  std::ostream& out) {
  const auto lm = load_pair_model(model_path, codebook_path);
  const auto ds = load_dataset(manifests);
  const auto ids = class_list(ds);
  const int pos_cls = (positive_class >= 0) ? positive_class : ids[0];

  const auto rects = lm.model.grid.enumerate();
  ensure_dir(outdir);
  std::vector<textio::CsvRow> side{{"file", "x", "y", "w", "h", "score"}};
  for (const auto& s : ds) {
    if (s.class_id != pos_cls) {
      out << "skipped (negative sample): " << s.file.filename().string() << "\n";
      continue;
    }
    const auto feats = dsvm::extract_sample_features(s.image, lm.codebook, rects);
    const auto p = dsvm::predict(lm.model, feats);
    const std::string name = "loc_" + s.file.filename().string();
    textio::write_pgm_overlay(outdir / name, s.image, p.window);
    side.push_back({s.file.filename().string(), std::to_string(p.window.x),
                    std::to_string(p.window.y), std::to_string(p.window.w),
                    std::to_string(p.window.h), fmt_g9(p.score)});
  }
  textio::write_csv(outdir / "localizations.csv", side);
  out << "wrote " << (side.size() - 1) << " overlays to " << outdir.string() << "\n";
}

// ---- mil-train / mil-eval ----

void cmd_mil_train(const std::vector<fs::path>& manifests, const fs::path& outdir, int rounds,
                   int budget, double alpha, int k, int min_cluster_size,
                   const std::string& grid_spec, int positive_class, uint64_t seed,
                   std::ostream& out) {
  const auto ds = load_dataset(manifests);
  const auto grid = grid_spec.empty() ? dsvm::WindowGrid::default_grid()
                                      : dsvm::WindowGrid::parse_spec(grid_spec);
  const auto cb = build_codebook_for(ds, k, min_cluster_size, seed);
  const auto feats = extract_pair_features(ds, cb, grid, positive_class);

  mil::MilTrainConfig cfg;
  cfg.rounds = rounds;
  cfg.instance_budget = budget;
  cfg.perceptron.alpha = alpha;
  cfg.seed = seed;
  const auto ensemble = mil::adaboost_train(feats.pos, feats.neg, grid, cb, cfg);

  ensure_dir(outdir);
  serialize::save_text(outdir / "codebook.txt", serialize::codebook_text(cb));
  serialize::save_text(outdir / "ensemble.txt", serialize::ensemble_text(ensemble));
  out << "boosted " << ensemble.rounds.size() << " weak classifiers"
      << (ensemble.stopped_early ? " (stopped early)" : "") << "\n";
}

void cmd_mil_eval(const std::vector<fs::path>& manifests, const fs::path& ensemble_path,
                  const fs::path& codebook_path, const fs::path& outdir, int positive_class,
                  std::ostream& out) {
  const auto cb = serialize::load_codebook(codebook_path);
  const auto ensemble = serialize::load_ensemble(ensemble_path);
  if (serialize::codebook_hash(cb) != ensemble.codebook_hash)
    throw ConfigError("ensemble was trained with a different codebook");

  const auto ds = load_dataset(manifests);
  const auto ids = class_list(ds);
  if (ids.size() != 2) throw ConfigError("mil-eval needs a 2-class dataset");
  const int pos_cls = (positive_class >= 0) ? positive_class : ids[0];
  const int neg_cls = (pos_cls == ids[0]) ? ids[1] : ids[0];

  const auto rects = ensemble.grid.enumerate();
  std::vector<textio::CsvRow> rows{{"file", "true_class", "predicted_class"}};
  int correct = 0;
  for (const auto& s : ds) {
    const auto feats = dsvm::extract_sample_features(s.image, cb, rects);
    const int label = mil::adaboost_classify(ensemble, feats);
    const int predicted = label > 0 ? pos_cls : neg_cls;
    correct += (predicted == s.class_id);
    rows.push_back(
        {s.file.filename().string(), std::to_string(s.class_id), std::to_string(predicted)});
  }
  ensure_dir(outdir);
  textio::write_csv(outdir / "mil_predictions.csv", rows);
  const double acc = static_cast<double>(correct) / ds.size();
  textio::write_csv(outdir / "mil_report.csv",
                    {{"n_test", "accuracy"}, {std::to_string(ds.size()), fmt_g9(acc)}});
  out << "MIL accuracy " << fmt_g9(acc) << " over " << ds.size() << " samples\n";
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  const auto rows = textio::read_csv(path);
  if (rows.empty()) throw FormatError(path.string() + ": empty manifest");
  std::vector<ManifestEntry> out;
  const fs::path base = path.parent_path();
  for (const auto& row : rows) {
    if (row.size() != 6) throw FormatError(path.string() + ": manifest rows need 6 fields");
    if (row[0] == "class_id") continue;  // header
    ManifestEntry e;
    try {
      e.class_id = std::stoi(row[0]);
      e.truth = Rect{std::stoi(row[2]), std::stoi(row[3]), std::stoi(row[4]), std::stoi(row[5])};
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": bad manifest row");
    }
    e.file = base / row[1];
    out.push_back(std::move(e));
  }
  return out;
}

imagecore::GlyphImage load_sample(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".txt" || ext == ".raster") return textio::read_text_raster(path);
  return textio::read_pgm(path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"similar-glyph discrimination toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::ignore_all);

  uint64_t seed = 1;
  std::string outdir = "out";
  app.add_option("--seed", seed, "RNG seed shared by all commands")->capture_default_str();
  app.add_option("--out", outdir, "output directory")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "generate a planted-pair dataset");
  std::string gen_spec;
  int gen_samples = -1, gen_jitter = -1, gen_train_count = -1;
  int64_t gen_seed = -1;
  gen->add_option("--spec", gen_spec, "pair spec file (key=value)")->required();
  gen->add_option("--samples", gen_samples, "override samples_per_class");
  gen->add_option("--jitter", gen_jitter, "override jitter");
  gen->add_option("--gen-seed", gen_seed, "override the spec seed");
  gen->add_option("--train-count", gen_train_count,
                  "also write train/test manifests with this many training samples per class");

  // train-pair
  auto* tp = app.add_subcommand("train-pair", "train the discriminative model for one pair");
  std::vector<std::string> tp_data;
  double tp_C = 1.0, tp_tau = 0.6, tp_inner_tol = 1e-7;
  int tp_max_outer = 30, tp_max_inner = 400, tp_k = 64, tp_mcs = 0, tp_positive = -1;
  std::string tp_grid;
  tp->add_option("--data", tp_data, "dataset manifest(s)")->required();
  tp->add_option("--C", tp_C, "hinge trade-off coefficient")->capture_default_str();
  tp->add_option("--tau", tp_tau, "total-violation stopping threshold")->capture_default_str();
  tp->add_option("--max-outer", tp_max_outer, "outer iteration cap")->capture_default_str();
  tp->add_option("--max-inner", tp_max_inner, "inner iteration cap")->capture_default_str();
  tp->add_option("--inner-tol", tp_inner_tol, "inner relative improvement tolerance")
      ->capture_default_str();
  tp->add_option("--k", tp_k, "codebook size")->capture_default_str();
  tp->add_option("--min-cluster-size", tp_mcs,
                 "codebook pruning threshold (0 = max(2, 0.1% of descriptors))");
  tp->add_option("--grid", tp_grid, "window grid override, e.g. stride=4;size=64;scales=16x16");
  tp->add_option("--positive-class", tp_positive, "positive class id (default: lower id)");

  // train-gate
  auto* tg = app.add_subcommand("train-gate", "train the baseline and logistic confidence gate");
  std::vector<std::string> tg_train, tg_gate;
  double tg_sigma = 0.96, tg_rate = 0.1;
  int tg_iters = 500;
  tg->add_option("--train-data", tg_train, "manifest(s) for baseline centroids")->required();
  tg->add_option("--gate-data", tg_gate, "manifest(s) scored to fit the gate")->required();
  tg->add_option("--sigma", tg_sigma, "acceptance threshold")->capture_default_str();
  tg->add_option("--rate", tg_rate, "gate learning rate")->capture_default_str();
  tg->add_option("--iters", tg_iters, "gate ascent iterations")->capture_default_str();

  // mine-pairs
  auto* mp = app.add_subcommand("mine-pairs", "mine similar pairs from a confusion log");
  std::string mp_log;
  int mp_T = 2;
  mp->add_option("--log", mp_log, "confusion CSV (true_id,predicted_id)")->required();
  mp->add_option("--T", mp_T, "pooled-count threshold; keep pairs with count > T")
      ->capture_default_str();

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a pair model or the full two-stage system");
  std::vector<std::string> ev_data;
  std::string ev_model, ev_codebook, ev_baseline, ev_gate, ev_table, ev_models;
  std::string ev_sweep = "0.7,0.8,0.9,0.92,0.94,0.95,0.96,0.97,0.98,1.0";
  int ev_positive = -1;
  ev->add_option("--data", ev_data, "test manifest(s)")->required();
  ev->add_option("--model", ev_model, "pair mode: model file");
  ev->add_option("--codebook", ev_codebook, "pair mode: codebook file");
  ev->add_option("--positive-class", ev_positive, "pair mode: positive class id");
  ev->add_option("--baseline", ev_baseline, "system mode: baseline file");
  ev->add_option("--gate", ev_gate, "system mode: gate file");
  ev->add_option("--table", ev_table, "system mode: similar-pair table");
  ev->add_option("--models", ev_models, "system mode: directory of pair_<a>_<b>/ models");
  ev->add_option("--sweep", ev_sweep, "system mode: comma-separated sigma values")
      ->capture_default_str();

  // localize
  auto* loc = app.add_subcommand("localize", "render predicted-window overlays for positives");
  std::vector<std::string> loc_data;
  std::string loc_model, loc_codebook;
  int loc_positive = -1;
  loc->add_option("--data", loc_data, "manifest(s)")->required();
  loc->add_option("--model", loc_model, "model file")->required();
  loc->add_option("--codebook", loc_codebook, "codebook file")->required();
  loc->add_option("--positive-class", loc_positive, "positive class id (default: lower id)");

  // mil-train
  auto* mt = app.add_subcommand("mil-train", "train the boosted window-distance baseline");
  std::vector<std::string> mt_data;
  int mt_rounds = 31, mt_budget = 500, mt_k = 64, mt_mcs = 0, mt_positive = -1;
  double mt_alpha = 0.1;
  std::string mt_grid;
  mt->add_option("--data", mt_data, "dataset manifest(s)")->required();
  mt->add_option("--rounds", mt_rounds, "boosting rounds")->capture_default_str();
  mt->add_option("--budget", mt_budget, "pattern candidates per round")->capture_default_str();
  mt->add_option("--alpha", mt_alpha, "perceptron learning rate")->capture_default_str();
  mt->add_option("--k", mt_k, "codebook size")->capture_default_str();
  mt->add_option("--min-cluster-size", mt_mcs, "codebook pruning threshold (0 = default)");
  mt->add_option("--grid", mt_grid, "window grid override");
  mt->add_option("--positive-class", mt_positive, "positive class id (default: lower id)");

  // mil-eval
  auto* me = app.add_subcommand("mil-eval", "evaluate a boosted ensemble");
  std::vector<std::string> me_data;
  std::string me_ensemble, me_codebook;
  int me_positive = -1;
  me->add_option("--data", me_data, "test manifest(s)")->required();
  me->add_option("--ensemble", me_ensemble, "ensemble file")->required();
  me->add_option("--codebook", me_codebook, "codebook file")->required();
  me->add_option("--positive-class", me_positive, "positive class id (default: lower id)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  auto to_paths = [](const std::vector<std::string>& v) {
    return std::vector<fs::path>(v.begin(), v.end());
  };

  try {
    const fs::path outp(outdir);
    if (gen->parsed()) {
      cmd_gen(gen_spec, outp, gen_samples, gen_jitter, gen_seed, gen_train_count, out);
    } else if (tp->parsed()) {
      cmd_train_pair(to_paths(tp_data), outp, tp_C, tp_tau, tp_max_outer, tp_max_inner,
                     tp_inner_tol, tp_k, tp_mcs, tp_grid, tp_positive, seed, out);
    } else if (tg->parsed()) {
      cmd_train_gate(to_paths(tg_train), to_paths(tg_gate), outp, tg_sigma, tg_rate, tg_iters,
                     out);
    } else if (mp->parsed()) {
      cmd_mine_pairs(mp_log, mp_T, outp, out);
    } else if (ev->parsed()) {
      if (!ev_model.empty()) {
        if (ev_codebook.empty()) throw ConfigError("pair mode needs --codebook");
        cmd_eval_pair(to_paths(ev_data), ev_model, ev_codebook, outp, ev_positive, out);
      } else {
        if (ev_baseline.empty() || ev_gate.empty() || ev_table.empty() || ev_models.empty())
          throw ConfigError("system mode needs --baseline, --gate, --table and --models");
        cmd_eval_system(to_paths(ev_data), ev_baseline, ev_gate, ev_table, ev_models, ev_sweep,
                        outp, out);
      }
    } else if (loc->parsed()) {
      cmd_localize(to_paths(loc_data), loc_model, loc_codebook, outp, loc_positive, out);
    } else if (mt->parsed()) {
      cmd_mil_train(to_paths(mt_data), outp, mt_rounds, mt_budget, mt_alpha, mt_k, mt_mcs, mt_grid,
                    mt_positive, seed, out);
    } else if (me->parsed()) {
      cmd_mil_eval(to_paths(me_data), me_ensemble, me_codebook, outp, me_positive, out);
    }
    write_run_config(app, outp);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace simglyph::cli
