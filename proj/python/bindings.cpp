#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "simglyph/dsvm.hpp"
#include "simglyph/features.hpp"
#include "simglyph/imagecore.hpp"
#include "simglyph/mil.hpp"
#include "simglyph/pipeline.hpp"
#include "simglyph/serialize.hpp"
#include "simglyph/synthdata.hpp"

namespace py = pybind11;
using namespace simglyph;

namespace {

imagecore::GlyphImage image_from_array(const py::array_t<uint8_t>& arr) {
  if (arr.ndim() != 2) throw py::value_error("image must be a 2-D uint8 array");
  auto buf = arr.unchecked<2>();
  imagecore::GlyphImage img(static_cast<int>(buf.shape(1)), static_cast<int>(buf.shape(0)));
  for (py::ssize_t y = 0; y < buf.shape(0); ++y)
    for (py::ssize_t x = 0; x < buf.shape(1); ++x)
      img.set(static_cast<int>(x), static_cast<int>(y), buf(y, x) ? 1 : 0);
  return img;
}

py::array_t<uint8_t> image_to_array(const imagecore::GlyphImage& img) {
  py::array_t<uint8_t> arr({img.height, img.width});
  auto buf = arr.mutable_unchecked<2>();
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) buf(y, x) = img.at(x, y);
  return arr;
}

dsvm::SampleFeatures features_from_array(const py::array_t<double>& arr) {
  if (arr.ndim() != 2) throw py::value_error("features must be a 2-D float array");
  auto buf = arr.unchecked<2>();
  dsvm::SampleFeatures f;
  f.dims = static_cast<int>(buf.shape(1));
  f.data.reserve(static_cast<size_t>(buf.shape(0)) * buf.shape(1));
  for (py::ssize_t i = 0; i < buf.shape(0); ++i)
    for (py::ssize_t j = 0; j < buf.shape(1); ++j) f.data.push_back(buf(i, j));
  return f;
}

py::array_t<double> features_to_array(const dsvm::SampleFeatures& f) {
  py::array_t<double> arr({f.window_count(), f.dims});
  auto buf = arr.mutable_unchecked<2>();
  for (int i = 0; i < f.window_count(); ++i)
    for (int j = 0; j < f.dims; ++j) buf(i, j) = f.row(i)[j];
  return arr;
}

std::vector<dsvm::SampleFeatures> features_from_list(const std::vector<py::array_t<double>>& v) {
  std::vector<dsvm::SampleFeatures> out;
  out.reserve(v.size());
  for (const auto& a : v) out.push_back(features_from_array(a));
  return out;
}

py::tuple rect_to_tuple(const Rect& r) { return py::make_tuple(r.x, r.y, r.w, r.h); }

}  // namespace

PYBIND11_MODULE(_simglyph, m) {
  m.doc() = "Joint localization and classification of similar binary glyphs.";

  py::register_exception<Error>(m, "SimglyphError");

  // ---- imagecore ----
  m.def(
      "normalize",
      [](const py::array_t<uint8_t>& img) { return image_to_array(imagecore::normalize(image_from_array(img))); },
      py::arg("image"), "Scale and center a binary raster onto the 64x64 grid.");
  m.def(
      "sobel",
      [](const py::array_t<uint8_t>& img) {
        const auto f = imagecore::sobel(image_from_array(img));
        py::array_t<double> gx({f.height, f.width}), gy({f.height, f.width}),
            mag({f.height, f.width});
        auto bx = gx.mutable_unchecked<2>();
        auto by = gy.mutable_unchecked<2>();
        auto bm = mag.mutable_unchecked<2>();
        for (int y = 0; y < f.height; ++y)
          for (int x = 0; x < f.width; ++x) {
            bx(y, x) = f.gx_at(x, y);
            by(y, x) = f.gy_at(x, y);
            bm(y, x) = f.mag_at(x, y);
          }
        return py::make_tuple(gx, gy, mag);
      },
      py::arg("image"), "Sobel responses (gx, gy, magnitude).");
  m.def(
      "extract_seeds",
      [](const py::array_t<uint8_t>& img) {
        const auto seeds = imagecore::extract_seeds(image_from_array(img));
        py::array_t<int> arr({static_cast<py::ssize_t>(seeds.points.size()), py::ssize_t(2)});
        auto buf = arr.mutable_unchecked<2>();
        for (size_t i = 0; i < seeds.points.size(); ++i) {
          buf(i, 0) = seeds.points[i].x;
          buf(i, 1) = seeds.points[i].y;
        }
        return arr;
      },
      py::arg("image"), "Subsampled external-contour seed points as (x, y) rows.");

  // ---- features ----
  m.def(
      "descriptors",
      [](const py::array_t<uint8_t>& img) {
        const auto image = image_from_array(img);
        const auto grad = imagecore::sobel(image);
        const auto seeds = imagecore::extract_seeds(image);
        const auto ds = features::all_descriptors(seeds, grad);
        py::array_t<double> arr(
            {static_cast<py::ssize_t>(ds.size()), py::ssize_t(features::GcParams::kBins)});
        auto buf = arr.mutable_unchecked<2>();
        for (size_t i = 0; i < ds.size(); ++i)
          for (int j = 0; j < features::GcParams::kBins; ++j) buf(i, j) = ds[i][j];
        return arr;
      },
      py::arg("image"), "Gradient-context descriptor per seed point.");

  py::class_<features::Codebook>(m, "Codebook")
      .def_property_readonly("centers",
                             [](const features::Codebook& cb) {
                               py::array_t<double> arr(
                                   {static_cast<py::ssize_t>(cb.centers.size()),
                                    py::ssize_t(features::GcParams::kBins)});
                               auto buf = arr.mutable_unchecked<2>();
                               for (size_t i = 0; i < cb.centers.size(); ++i)
                                 for (int j = 0; j < features::GcParams::kBins; ++j)
                                   buf(i, j) = cb.centers[i][j];
                               return arr;
                             })
      .def_readonly("k", &features::Codebook::k)
      .def_readonly("min_cluster_size", &features::Codebook::min_cluster_size)
      .def_readonly("rng_seed", &features::Codebook::rng_seed)
      .def("__len__", [](const features::Codebook& cb) { return cb.centers.size(); })
      .def("to_text", [](const features::Codebook& cb) { return serialize::codebook_text(cb); })
      .def_static("from_text",
                  [](const std::string& t) { return serialize::parse_codebook(t); });

  m.def(
      "build_codebook",
      [](const py::array_t<double>& descriptors, int k, int min_cluster_size, uint64_t seed) {
        if (descriptors.ndim() != 2 || descriptors.shape(1) != features::GcParams::kBins)
          throw py::value_error("descriptors must be (n, 32)");
        auto buf = descriptors.unchecked<2>();
        std::vector<features::GcDescriptor> ds(buf.shape(0));
        for (py::ssize_t i = 0; i < buf.shape(0); ++i)
          for (int j = 0; j < features::GcParams::kBins; ++j) ds[i][j] = buf(i, j);
        return features::build_codebook(ds, k, min_cluster_size, seed);
      },
      py::arg("descriptors"), py::arg("k"), py::arg("min_cluster_size") = 2, py::arg("seed") = 1);

  // ---- window grid + sample features ----
  py::class_<dsvm::WindowGrid>(m, "WindowGrid")
      .def(py::init([](const std::string& spec) { return dsvm::WindowGrid::parse_spec(spec); }),
           py::arg("spec"))
      .def_static("default_grid", &dsvm::WindowGrid::default_grid)
      .def_property_readonly("stride", [](const dsvm::WindowGrid& g) { return g.stride; })
      .def("spec_string", &dsvm::WindowGrid::spec_string)
      .def("windows", [](const dsvm::WindowGrid& g) {
        const auto rects = g.enumerate();
        py::array_t<int> arr({static_cast<py::ssize_t>(rects.size()), py::ssize_t(4)});
        auto buf = arr.mutable_unchecked<2>();
        for (size_t i = 0; i < rects.size(); ++i) {
          buf(i, 0) = rects[i].x;
          buf(i, 1) = rects[i].y;
          buf(i, 2) = rects[i].w;
          buf(i, 3) = rects[i].h;
        }
        return arr;
      });

  m.def(
      "sample_features",
      [](const py::array_t<uint8_t>& img, const features::Codebook& cb,
         const dsvm::WindowGrid& grid) {
        return features_to_array(
            dsvm::extract_sample_features(image_from_array(img), cb, grid.enumerate()));
      },
      py::arg("image"), py::arg("codebook"), py::arg("grid"),
      "Codeword-count feature row per grid window.");

  // ---- discriminative model ----
  py::class_<dsvm::SvmModel>(m, "SvmModel")
      .def_property_readonly("w",
                             [](const dsvm::SvmModel& mdl) {
                               return py::array_t<double>(
                                   static_cast<py::ssize_t>(mdl.w.size()), mdl.w.data());
                             })
      .def_readonly("b", &dsvm::SvmModel::b)
      .def_property_readonly("grid", [](const dsvm::SvmModel& mdl) { return mdl.grid; })
      .def("to_text", [](const dsvm::SvmModel& mdl) { return serialize::model_text(mdl); })
      .def_static("from_text", [](const std::string& t) { return serialize::parse_model(t); });

  m.def(
      "train",
      [](const std::vector<py::array_t<double>>& pos, const std::vector<py::array_t<double>>& neg,
         const features::Codebook& cb, const dsvm::WindowGrid& grid, double C, double tau,
         int max_outer, int max_inner, double inner_tol) {
        dsvm::TrainConfig cfg;
        cfg.C = C;
        cfg.tau = tau;
        cfg.max_outer_iters = max_outer;
        cfg.max_inner_iters = max_inner;
        cfg.inner_rel_tol = inner_tol;
        const auto result = dsvm::train(features_from_list(pos), features_from_list(neg), cfg,
                                        grid, cb);
        py::dict trace;
        py::list obj, tv, cache;
        for (const auto& row : result.trace.outer) {
          obj.append(row.obj);
          tv.append(row.tv);
          cache.append(row.cache_size);
        }
        trace["obj"] = obj;
        trace["tv"] = tv;
        trace["cache_size"] = cache;
        return py::make_tuple(result.model, trace);
      },
      py::arg("pos"), py::arg("neg"), py::arg("codebook"), py::arg("grid"), py::arg("C") = 1.0,
      py::arg("tau") = 0.6, py::arg("max_outer") = 30, py::arg("max_inner") = 400,
      py::arg("inner_tol") = 1e-7,
      "Cutting-plane training; returns (model, trace dict).");

  m.def(
      "predict",
      [](const dsvm::SvmModel& mdl, const py::array_t<double>& feats) {
        const auto p = dsvm::predict(mdl, features_from_array(feats));
        return py::make_tuple(p.label, rect_to_tuple(p.window), p.score);
      },
      py::arg("model"), py::arg("features"),
      "Joint decision: (label, localized window, score).");

  // ---- synthetic pairs ----
  py::class_<synthdata::PairSpec>(m, "PairSpec")
      .def_static("random_spec", &synthdata::PairSpec::random_spec, py::arg("seed"))
      .def_static("from_text", &synthdata::PairSpec::parse_text)
      .def("to_text", &synthdata::PairSpec::to_text)
      .def_readwrite("seed", &synthdata::PairSpec::seed)
      .def_readwrite("jitter", &synthdata::PairSpec::jitter)
      .def_readwrite("samples_per_class", &synthdata::PairSpec::samples_per_class)
      .def_property_readonly("region",
                             [](const synthdata::PairSpec& s) { return rect_to_tuple(s.region); });

  m.def(
      "generate_pair",
      [](const synthdata::PairSpec& spec) {
        const auto ds = synthdata::generate_pair(spec);
        py::list pos, neg, truth;
        for (const auto& img : ds.positives) pos.append(image_to_array(img));
        for (const auto& img : ds.negatives) neg.append(image_to_array(img));
        for (const auto& r : ds.truth) truth.append(rect_to_tuple(r));
        return py::make_tuple(pos, neg, truth);
      },
      py::arg("spec"), "Deterministic planted-pair dataset: (positives, negatives, truth boxes).");

  // ---- pipeline pieces ----
  m.def(
      "train_gate",
      [](const std::vector<std::tuple<double, double, int>>& samples, double rate, int iters) {
        std::vector<pipeline::GateSample> gs;
        for (const auto& [s1, s2, y] : samples) gs.push_back({s1, s2, y});
        pipeline::GateTrainConfig cfg;
        cfg.learning_rate = rate;
        cfg.iterations = iters;
        const auto theta = pipeline::train_gate(gs, cfg);
        return py::make_tuple(theta[0], theta[1], theta[2]);
      },
      py::arg("samples"), py::arg("rate") = 0.1, py::arg("iters") = 500);
  m.def(
      "gate_confidence",
      [](double t0, double t1, double t2, double s1, double s2) {
        pipeline::ConfidenceGate g;
        g.theta = {t0, t1, t2};
        return pipeline::gate_confidence(g, s1, s2);
      },
      py::arg("t0"), py::arg("t1"), py::arg("t2"), py::arg("s1"), py::arg("s2"));
  m.def(
      "mine_pairs",
      [](const std::vector<std::pair<int, int>>& log, int threshold) {
        const auto table = pipeline::mine_pairs(log, threshold);
        py::list out;
        for (const auto& p : table.pairs) out.append(py::make_tuple(p.a, p.b, p.count));
        return out;
      },
      py::arg("confusion_log"), py::arg("threshold") = 2);

  // ---- boosted baseline ----
  py::class_<mil::AdaBoostEnsemble>(m, "AdaBoostEnsemble")
      .def_property_readonly("rounds",
                             [](const mil::AdaBoostEnsemble& e) { return e.rounds.size(); })
      .def_readonly("stopped_early", &mil::AdaBoostEnsemble::stopped_early)
      .def("to_text", [](const mil::AdaBoostEnsemble& e) { return serialize::ensemble_text(e); });

  m.def(
      "adaboost_train",
      [](const std::vector<py::array_t<double>>& pos, const std::vector<py::array_t<double>>& neg,
         const features::Codebook& cb, const dsvm::WindowGrid& grid, int rounds, int budget,
         double alpha, uint64_t seed) {
        mil::MilTrainConfig cfg;
        cfg.rounds = rounds;
        cfg.instance_budget = budget;
        cfg.perceptron.alpha = alpha;
        cfg.seed = seed;
        return mil::adaboost_train(features_from_list(pos), features_from_list(neg), grid, cb,
                                   cfg);
      },
      py::arg("pos"), py::arg("neg"), py::arg("codebook"), py::arg("grid"), py::arg("rounds") = 31,
      py::arg("budget") = 500, py::arg("alpha") = 0.1, py::arg("seed") = 1);
  m.def(
      "adaboost_classify",
      [](const mil::AdaBoostEnsemble& e, const py::array_t<double>& feats) {
        return mil::adaboost_classify(e, features_from_array(feats));
      },
      py::arg("ensemble"), py::arg("features"));
}
