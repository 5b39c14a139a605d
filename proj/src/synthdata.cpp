#include "simglyph/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "simglyph/errors.hpp"
#include "simglyph/rng.hpp"
#include "simglyph/textio.hpp"

namespace simglyph::synthdata {

using imagecore::GlyphImage;
using imagecore::kNormalizedSize;

Motif Motif::bar(int w, int h) {
  Motif m;
  m.width = w;
  m.height = h;
  m.pixels.assign(static_cast<size_t>(w) * h, 1);
  return m;
}

Motif Motif::dot(int radius) {
  const int d = 2 * radius + 1;
  Motif m;
  m.width = d;
  m.height = d;
  m.pixels.assign(static_cast<size_t>(d) * d, 0);
  for (int y = 0; y < d; ++y)
    for (int x = 0; x < d; ++x)
      if ((x - radius) * (x - radius) + (y - radius) * (y - radius) <= radius * radius)
        m.pixels[static_cast<size_t>(y) * d + x] = 1;
  return m;
}

Motif Motif::parse_rows(const std::string& rows) {
  std::vector<std::string> lines;
  std::istringstream in(rows);
  std::string line;
  while (std::getline(in, line, ';'))
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) throw SpecError("motif: empty pattern");
  Motif m;
  m.width = static_cast<int>(lines[0].size());
  m.height = static_cast<int>(lines.size());
  for (const auto& l : lines) {
    if (static_cast<int>(l.size()) != m.width) throw SpecError("motif: ragged rows");
    for (char c : l) {
      if (c != '0' && c != '1') throw SpecError("motif: rows must be '0'/'1'");
      m.pixels.push_back(c == '1' ? 1 : 0);
    }
  }
  bool any = false;
  for (uint8_t p : m.pixels) any |= (p != 0);
  if (!any) throw SpecError("motif: no foreground pixels");
  return m;
}

std::string Motif::to_rows() const {
  std::string out;
  for (int y = 0; y < height; ++y) {
    if (y) out.push_back(';');
    for (int x = 0; x < width; ++x) out.push_back(at(x, y) ? '1' : '0');
  }
  return out;
}

void PairSpec::validate() const {
  if (samples_per_class < 1) throw SpecError("spec: samples_per_class must be >= 1");
  if (jitter < 0) throw SpecError("spec: jitter must be >= 0");
  if (motif.width < 1 || motif.height < 1 ||
      motif.pixels.size() != static_cast<size_t>(motif.width) * motif.height)
    throw SpecError("spec: malformed motif");
  if (region.w < 1 || region.h < 1 || region.x < 0 || region.y < 0 ||
      region.x + region.w > kNormalizedSize || region.y + region.h > kNormalizedSize)
    throw SpecError("spec: planted region outside the 64x64 raster");
  if (motif.width > region.w || motif.height > region.h)
    throw SpecError("spec: motif larger than the planted region");
  if (scaffold_min < 1 || scaffold_max < scaffold_min)
    throw SpecError("spec: bad scaffold stroke range");
  if (class_negative == class_positive) throw SpecError("spec: classes must differ");

  // The motif, centered in the region and shifted by at most `jitter`, must
  // stay inside the raster.
  const int cx = region.x + region.w / 2;
  const int cy = region.y + region.h / 2;
  const int x0 = cx - motif.width / 2 - jitter;
  const int y0 = cy - motif.height / 2 - jitter;
  const int x1 = cx - motif.width / 2 + motif.width + jitter;
  const int y1 = cy - motif.height / 2 + motif.height + jitter;
  if (x0 < 0 || y0 < 0 || x1 > kNormalizedSize || y1 > kNormalizedSize)
    throw SpecError("spec: jitter can push the motif outside the raster");
}

std::string PairSpec::to_text() const {
  std::ostringstream region_ss;
  region_ss << region.x << "," << region.y << "," << region.w << "," << region.h;
  return textio::kv_string({
      {"seed", std::to_string(seed)},
      {"region", region_ss.str()},
      {"motif", motif.to_rows()},
      {"jitter", std::to_string(jitter)},
      {"samples_per_class", std::to_string(samples_per_class)},
      {"scaffold_min", std::to_string(scaffold_min)},
      {"scaffold_max", std::to_string(scaffold_max)},
      {"class_negative", std::to_string(class_negative)},
      {"class_positive", std::to_string(class_positive)},
  });
}

PairSpec PairSpec::parse_text(const std::string& content) {
  auto kv = textio::parse_kv(content);
  PairSpec spec;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    if (const auto* v = get("seed")) spec.seed = std::stoull(*v);
    if (const auto* v = get("region")) {
      std::istringstream ss(*v);
      std::string f;
      int vals[4];
      for (int& val : vals) {
        if (!std::getline(ss, f, ',')) throw SpecError("spec: region needs x,y,w,h");
        val = std::stoi(f);
      }
      spec.region = Rect{vals[0], vals[1], vals[2], vals[3]};
    }
    if (const auto* v = get("motif")) spec.motif = Motif::parse_rows(*v);
    if (const auto* v = get("jitter")) spec.jitter = std::stoi(*v);
    if (const auto* v = get("samples_per_class")) spec.samples_per_class = std::stoi(*v);
    if (const auto* v = get("scaffold_min")) spec.scaffold_min = std::stoi(*v);
    if (const auto* v = get("scaffold_max")) spec.scaffold_max = std::stoi(*v);
    if (const auto* v = get("class_negative")) spec.class_negative = std::stoi(*v);
    if (const auto* v = get("class_positive")) spec.class_positive = std::stoi(*v);
  } catch (const std::invalid_argument&) {
    throw SpecError("spec: non-numeric field value");
  } catch (const std::out_of_range&) {
    throw SpecError("spec: field value out of range");
  }
  if (spec.motif.pixels.empty()) throw SpecError("spec: motif is required");
  spec.validate();
  return spec;
}

PairSpec PairSpec::random_spec(uint64_t seed) {
  Rng rng(seed);
  PairSpec spec;
  spec.seed = seed;
  spec.jitter = rng.range(2, 4);

  // Radical-scale motifs: the descriptor neighborhood smears class evidence
  // about one outer radius beyond the motif, so a region comparable to the
  // sliding-window scales keeps the localization target commensurate with
  // what any window can capture.
  if (rng.range(0, 3) == 0) {
    spec.motif = Motif::dot(rng.range(11, 12));
  } else {
    spec.motif = Motif::bar(rng.range(22, 26), rng.range(22, 26));
  }
  const int rw = spec.motif.width + 2;
  const int rh = spec.motif.height + 2;
  const int margin = spec.jitter + 2;
  spec.region = Rect{rng.range(margin, kNormalizedSize - rw - margin),
                     rng.range(margin, kNormalizedSize - rh - margin), rw, rh};
  spec.validate();
  return spec;
}

namespace {

struct Stroke {
  Point a, b;
  int thickness;
};

void stamp_brush(GlyphImage& img, int x, int y, int t) {
  const int half = t / 2;
  for (int dy = -half; dy < t - half; ++dy) {
    for (int dx = -half; dx < t - half; ++dx) {
      if (img.in_bounds(x + dx, y + dy)) img.set(x + dx, y + dy, 1);
    }
  }
}

void draw_stroke(GlyphImage& img, const Stroke& s, int dx, int dy, int dt) {
  const int t = std::max(1, s.thickness + dt);
  int x0 = s.a.x + dx, y0 = s.a.y + dy;
  const int x1 = s.b.x + dx, y1 = s.b.y + dy;
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  const int adx = std::abs(x1 - x0), ady = std::abs(y1 - y0);
  int err = adx - ady;
  while (true) {
    stamp_brush(img, x0, y0, t);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 > -ady) {
      err -= ady;
      x0 += sx;
    }
    if (e2 < adx) {
      err += adx;
      y0 += sy;
    }
  }
}

// Widest jitter footprint of a stroke, used to keep scaffolding away from
// the planted region under every per-sample translation.
bool stroke_clear_of(const Stroke& s, const Rect& keep_out) {
  GlyphImage probe(kNormalizedSize, kNormalizedSize);
  draw_stroke(probe, s, 0, 0, +1);
  const Rect clipped = rect_intersection(keep_out, Rect{0, 0, kNormalizedSize, kNormalizedSize});
  for (int y = clipped.y; y < clipped.y + clipped.h; ++y)
    for (int x = clipped.x; x < clipped.x + clipped.w; ++x)
      if (probe.at(x, y)) return false;
  return true;
}

Point random_border_point(Rng& rng, int side) {
  const int m = kNormalizedSize - 1;
  switch (side) {
    case 0: return Point{rng.range(0, m), 0};
    case 1: return Point{rng.range(0, m), m};
    case 2: return Point{0, rng.range(0, m)};
    default: return Point{m, rng.range(0, m)};
  }
}

}  // namespace

PairDataset generate_pair(const PairSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  // Scaffolding keeps a 2-pixel margin around the planted region at its base
  // position, so the motif stays the only systematic class difference.
  // Strokes may run right past the region, which mirrors characters whose
  // shared strokes surround the discriminative part.
  const Rect keep_out = rect_dilate(spec.region, 2);

  const int stroke_count = rng.range(spec.scaffold_min, spec.scaffold_max);
  std::vector<Stroke> scaffold;
  int attempts = 0;
  while (static_cast<int>(scaffold.size()) < stroke_count) {
    if (++attempts > 400 * stroke_count)
      throw SpecError("generate_pair: cannot place scaffolding around the planted region");
    int side_a = rng.range(0, 3);
    int side_b = rng.range(0, 3);
    if (side_a == side_b) side_b = (side_b + 1) % 4;
    Stroke s{random_border_point(rng, side_a), random_border_point(rng, side_b), rng.range(2, 3)};
    if (stroke_clear_of(s, keep_out)) scaffold.push_back(s);
  }

  const int cx = spec.region.x + spec.region.w / 2;
  const int cy = spec.region.y + spec.region.h / 2;

  // Tight bounding box of the motif mask, so the recorded ground truth is
  // the box of the pixels actually drawn.
  int mbx0 = spec.motif.width, mby0 = spec.motif.height, mbx1 = -1, mby1 = -1;
  for (int y = 0; y < spec.motif.height; ++y) {
    for (int x = 0; x < spec.motif.width; ++x) {
      if (!spec.motif.at(x, y)) continue;
      mbx0 = std::min(mbx0, x);
      mby0 = std::min(mby0, y);
      mbx1 = std::max(mbx1, x);
      mby1 = std::max(mby1, y);
    }
  }

  auto render = [&](bool positive, Rng& sample_rng, Rect* truth) {
    GlyphImage img(kNormalizedSize, kNormalizedSize);
    const int tx = spec.jitter ? sample_rng.range(-spec.jitter, spec.jitter) : 0;
    const int ty = spec.jitter ? sample_rng.range(-spec.jitter, spec.jitter) : 0;
    for (const Stroke& s : scaffold) {
      const int dt = spec.jitter ? sample_rng.range(-1, 1) : 0;
      draw_stroke(img, s, tx, ty, dt);
    }
    if (positive) {
      const int mx = spec.jitter ? sample_rng.range(-spec.jitter, spec.jitter) : 0;
      const int my = spec.jitter ? sample_rng.range(-spec.jitter, spec.jitter) : 0;
      const int ox = cx - spec.motif.width / 2 + mx;
      const int oy = cy - spec.motif.height / 2 + my;
      for (int y = 0; y < spec.motif.height; ++y)
        for (int x = 0; x < spec.motif.width; ++x)
          if (spec.motif.at(x, y)) img.set(ox + x, oy + y, 1);
      if (truth) *truth = Rect{ox + mbx0, oy + mby0, mbx1 - mbx0 + 1, mby1 - mby0 + 1};
    }
    return img;
  };

  PairDataset ds;
  ds.spec = spec;
  for (int i = 0; i < spec.samples_per_class; ++i) {
    Rng sample_rng(rng.next());
    ds.negatives.push_back(render(false, sample_rng, nullptr));
  }
  for (int i = 0; i < spec.samples_per_class; ++i) {
    Rng sample_rng(rng.next());
    Rect truth;
    ds.positives.push_back(render(true, sample_rng, &truth));
    ds.truth.push_back(truth);
  }
  return ds;
}

}  // namespace simglyph::synthdata
