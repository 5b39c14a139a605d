#include "simglyph/serialize.hpp"

#include <sstream>

#include "simglyph/errors.hpp"
#include "simglyph/textio.hpp"

namespace simglyph::serialize {

using textio::fmt_g9;

namespace {

constexpr const char* kCodebookMagic = "simglyph-codebook v1";
constexpr const char* kModelMagic = "simglyph-dsvm v1";
constexpr const char* kGateMagic = "simglyph-gate v1";
constexpr const char* kTableMagic = "simglyph-pairs v1";
constexpr const char* kBaselineMagic = "simglyph-baseline v1";
constexpr const char* kEnsembleMagic = "simglyph-mil v1";

// Line cursor over a text artifact.
class Lines {
 public:
  explicit Lines(const std::string& text) : in_(text) {}

  std::string next(const std::string& what) {
    std::string line;
    while (std::getline(in_, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    throw FormatError("truncated artifact: expected " + what);
  }

  void expect_magic(const std::string& magic) {
    if (next("magic line") != magic) throw FormatError("bad magic line (want '" + magic + "')");
  }

  // "key value..." line; returns the value part.
  std::string field(const std::string& key) {
    std::string line = next("field '" + key + "'");
    if (line.rfind(key + " ", 0) != 0)
      throw FormatError("expected field '" + key + "', got '" + line + "'");
    return line.substr(key.size() + 1);
  }

 private:
  std::istringstream in_;
};

double parse_double(const std::string& s) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw FormatError("trailing characters in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw FormatError("bad number '" + s + "'");
  }
}

long long parse_int(const std::string& s) {
  try {
    size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw FormatError("trailing characters in integer '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw FormatError("bad integer '" + s + "'");
  }
}

uint64_t parse_hex(const std::string& s) { return std::stoull(s, nullptr, 16); }

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

// ---- codebook ----

std::string codebook_text(const features::Codebook& cb) {
  std::ostringstream out;
  out << kCodebookMagic << "\n";
  out << "k " << cb.k << "\n";
  out << "dims " << cb.dims() << "\n";
  out << "min_cluster_size " << cb.min_cluster_size << "\n";
  out << "rng_seed " << cb.rng_seed << "\n";
  out << "centers " << cb.size() << "\n";
  for (const auto& c : cb.centers) {
    for (size_t i = 0; i < c.size(); ++i) {
      if (i) out << " ";
      out << fmt_g9(c[i]);
    }
    out << "\n";
  }
  return out.str();
}

features::Codebook parse_codebook(const std::string& text) {
  Lines lines(text);
  lines.expect_magic(kCodebookMagic);
  features::Codebook cb;
  cb.k = static_cast<int>(parse_int(lines.field("k")));
  const int dims = static_cast<int>(parse_int(lines.field("dims")));
  if (dims != features::GcParams::kBins) throw FormatError("codebook: unsupported dims");
  cb.min_cluster_size = static_cast<int>(parse_int(lines.field("min_cluster_size")));
  cb.rng_seed = static_cast<uint64_t>(parse_int(lines.field("rng_seed")));
  const int n = static_cast<int>(parse_int(lines.field("centers")));
  for (int i = 0; i < n; ++i) {
    const auto toks = split_ws(lines.next("center row"));
    if (static_cast<int>(toks.size()) != dims) throw FormatError("codebook: bad center row");
    features::GcDescriptor c{};
    for (int d = 0; d < dims; ++d) c[d] = parse_double(toks[d]);
    cb.centers.push_back(c);
  }
  return cb;
}

uint64_t codebook_hash(const features::Codebook& cb) { return textio::fnv1a(codebook_text(cb)); }

// ---- dsvm model ----

std::string model_text(const dsvm::SvmModel& m) {
  std::ostringstream out;
  out << kModelMagic << "\n";
  out << "codebook_hash " << textio::hex64(m.codebook_hash) << "\n";
  out << "grid " << m.grid.spec_string() << "\n";
  out << "C " << fmt_g9(m.C) << "\n";
  out << "tau " << fmt_g9(m.tau) << "\n";
  out << "dims " << m.w.size() << "\n";
  out << "b " << fmt_g9(m.b) << "\n";
  for (double v : m.w) out << fmt_g9(v) << "\n";
  return out.str();
}

dsvm::SvmModel parse_model(const std::string& text) {
  Lines lines(text);
  lines.expect_magic(kModelMagic);
  dsvm::SvmModel m;
  m.codebook_hash = parse_hex(lines.field("codebook_hash"));
  m.grid = dsvm::WindowGrid::parse_spec(lines.field("grid"));
  m.C = parse_double(lines.field("C"));
  m.tau = parse_double(lines.field("tau"));
  const int dims = static_cast<int>(parse_int(lines.field("dims")));
  m.b = parse_double(lines.field("b"));
  m.w.reserve(dims);
  for (int i = 0; i < dims; ++i) m.w.push_back(parse_double(lines.next("weight entry")));
  return m;
}

// ---- gate ----

std::string gate_text(const pipeline::ConfidenceGate& g) {
  std::ostringstream out;
  out << kGateMagic << "\n";
  out << "theta " << fmt_g9(g.theta[0]) << " " << fmt_g9(g.theta[1]) << " " << fmt_g9(g.theta[2])
      << "\n";
  out << "sigma " << fmt_g9(g.sigma) << "\n";
  return out.str();
}

pipeline::ConfidenceGate parse_gate(const std::string& text) {
  Lines lines(text);
  lines.expect_magic(kGateMagic);
  pipeline::ConfidenceGate g;
  const auto toks = split_ws(lines.field("theta"));
  if (toks.size() != 3) throw FormatError("gate: theta needs 3 values");
  for (int i = 0; i < 3; ++i) g.theta[i] = parse_double(toks[i]);
  g.sigma = parse_double(lines.field("sigma"));
  if (g.sigma < 0.0 || g.sigma > 1.0) throw FormatError("gate: sigma must be in [0,1]");
  return g;
}

// ---- similar-pair table ----

std::string table_text(const pipeline::SimilarPairTable& t) {
  std::ostringstream out;
  out << kTableMagic << "\n";
  out << "pairs " << t.pairs.size() << "\n";
  for (const auto& p : t.pairs) {
    out << p.a << " " << p.b << " " << p.count << " " << p.positive_class << " "
        << (p.model_ref.empty() ? "-" : p.model_ref) << "\n";
  }
  return out.str();
}

pipeline::SimilarPairTable parse_table(const std::string& text) {
  Lines lines(text);
  lines.expect_magic(kTableMagic);
  pipeline::SimilarPairTable t;
  const int n = static_cast<int>(parse_int(lines.field("pairs")));
  for (int i = 0; i < n; ++i) {
    const auto toks = split_ws(lines.next("pair row"));
    if (toks.size() != 5) throw FormatError("table: pair row needs 5 fields");
    pipeline::SimilarPair p;
    p.a = static_cast<int>(parse_int(toks[0]));
    p.b = static_cast<int>(parse_int(toks[1]));
    p.count = static_cast<int>(parse_int(toks[2]));
    p.positive_class = static_cast<int>(parse_int(toks[3]));
    if (toks[4] != "-") p.model_ref = toks[4];
    t.pairs.push_back(std::move(p));
  }
  return t;
}

// ---- baseline ----

std::string baseline_text(const pipeline::NearestCentroidBaseline& b) {
  std::ostringstream out;
  out << kBaselineMagic << "\n";
  out << "grid " << b.grid << "\n";
  out << "shrinkage " << fmt_g9(b.shrinkage) << "\n";
  out << "classes " << b.class_ids.size() << "\n";
  for (size_t c = 0; c < b.class_ids.size(); ++c) {
    out << b.class_ids[c];
    for (double v : b.centroids[c]) out << " " << fmt_g9(v);
    out << "\n";
  }
  return out.str();
}

pipeline::NearestCentroidBaseline parse_baseline(const std::string& text) {
  Lines lines(text);
  lines.expect_magic(kBaselineMagic);
  pipeline::NearestCentroidBaseline b;
  b.grid = static_cast<int>(parse_int(lines.field("grid")));
  b.shrinkage = parse_double(lines.field("shrinkage"));
  const int n = static_cast<int>(parse_int(lines.field("classes")));
  const size_t dims = static_cast<size_t>(b.grid) * b.grid;
  for (int i = 0; i < n; ++i) {
    const auto toks = split_ws(lines.next("class row"));
    if (toks.size() != dims + 1) throw FormatError("baseline: bad class row");
    b.class_ids.push_back(static_cast<int>(parse_int(toks[0])));
    std::vector<double> centroid(dims);
    for (size_t d = 0; d < dims; ++d) centroid[d] = parse_double(toks[d + 1]);
    b.centroids.push_back(std::move(centroid));
  }
  return b;
}

// ---- MIL ensemble ----

std::string ensemble_text(const mil::AdaBoostEnsemble& e) {
  std::ostringstream out;
  out << kEnsembleMagic << "\n";
  out << "codebook_hash " << textio::hex64(e.codebook_hash) << "\n";
  out << "grid " << e.grid.spec_string() << "\n";
  out << "stopped_early " << (e.stopped_early ? 1 : 0) << "\n";
  out << "rounds " << e.rounds.size() << "\n";
  for (const auto& r : e.rounds) {
    out << fmt_g9(r.alpha) << " " << fmt_g9(r.weighted_error) << " " << r.weak.polarity << " "
        << fmt_g9(r.weak.threshold) << " " << r.weak.window_index << " " << r.weak.window.x << " "
        << r.weak.window.y << " " << r.weak.window.w << " " << r.weak.window.h;
    for (int v : r.weak.pattern) out << " " << v;
    out << "\n";
  }
  return out.str();
}

mil::AdaBoostEnsemble parse_ensemble(const std::string& text) {
  Lines lines(text);
  lines.expect_magic(kEnsembleMagic);
  mil::AdaBoostEnsemble e;
  e.codebook_hash = parse_hex(lines.field("codebook_hash"));
  e.grid = dsvm::WindowGrid::parse_spec(lines.field("grid"));
  e.stopped_early = parse_int(lines.field("stopped_early")) != 0;
  const int n = static_cast<int>(parse_int(lines.field("rounds")));
  for (int i = 0; i < n; ++i) {
    const auto toks = split_ws(lines.next("round row"));
    if (toks.size() < 10) throw FormatError("ensemble: bad round row");
    mil::BoostedRound r;
    r.alpha = parse_double(toks[0]);
    r.weighted_error = parse_double(toks[1]);
    r.weak.polarity = static_cast<int>(parse_int(toks[2]));
    if (r.weak.polarity != 1 && r.weak.polarity != -1)
      throw FormatError("ensemble: polarity must be +1 or -1");
    r.weak.threshold = parse_double(toks[3]);
    r.weak.window_index = static_cast<int>(parse_int(toks[4]));
    r.weak.window = Rect{static_cast<int>(parse_int(toks[5])), static_cast<int>(parse_int(toks[6])),
                         static_cast<int>(parse_int(toks[7])), static_cast<int>(parse_int(toks[8]))};
    for (size_t j = 9; j < toks.size(); ++j)
      r.weak.pattern.push_back(static_cast<int>(parse_int(toks[j])));
    e.rounds.push_back(std::move(r));
  }
  return e;
}

// ---- file wrappers ----

void save_text(const std::filesystem::path& path, const std::string& text) {
  textio::write_file_atomic(path, text);
}

features::Codebook load_codebook(const std::filesystem::path& path) {
  return parse_codebook(textio::read_file(path));
}
dsvm::SvmModel load_model(const std::filesystem::path& path) {
  return parse_model(textio::read_file(path));
}
pipeline::ConfidenceGate load_gate(const std::filesystem::path& path) {
  return parse_gate(textio::read_file(path));
}
pipeline::SimilarPairTable load_table(const std::filesystem::path& path) {
  return parse_table(textio::read_file(path));
}
pipeline::NearestCentroidBaseline load_baseline(const std::filesystem::path& path) {
  return parse_baseline(textio::read_file(path));
}
mil::AdaBoostEnsemble load_ensemble(const std::filesystem::path& path) {
  return parse_ensemble(textio::read_file(path));
}

}  // namespace simglyph::serialize
