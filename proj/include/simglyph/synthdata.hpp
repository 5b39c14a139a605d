#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simglyph/geometry.hpp"
#include "simglyph/imagecore.hpp"

namespace simglyph::synthdata {

// Small binary stamp drawn only in positive samples.
struct Motif {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

  static Motif bar(int w, int h);
  static Motif dot(int radius);
  // Rows of '0'/'1' separated by ';', e.g. "111;101;111".
  static Motif parse_rows(const std::string& rows);
  std::string to_rows() const;
};

// Deterministic recipe for one similar-glyph pair: shared stroke scaffolding,
// a planted region holding the motif in positives only, and per-sample jitter
// (translation, stroke thickness, motif offset).
struct PairSpec {
  uint64_t seed = 1;
  Rect region{24, 24, 16, 16};
  Motif motif;
  int jitter = 2;
  int samples_per_class = 50;
  int scaffold_min = 4;
  int scaffold_max = 8;
  // Lower class id = the motif-bearing (positive) class, matching the
  // positive-class convention used when pairs are mined and trained.
  int class_positive = 0;
  int class_negative = 1;

  void validate() const;  // throws SpecError

  std::string to_text() const;
  static PairSpec parse_text(const std::string& content);

  // Desk-scale spec with randomized region, motif, and stroke layout.
  static PairSpec random_spec(uint64_t seed);
};

struct PairDataset {
  PairSpec spec;
  std::vector<imagecore::GlyphImage> positives;
  std::vector<imagecore::GlyphImage> negatives;
  std::vector<Rect> truth;  // actual motif bounding box per positive sample
};

// Fully deterministic given spec.seed. Scaffolding is shared by both classes;
// positives additionally carry the motif inside the planted region. Throws
// SpecError when the spec is infeasible.
PairDataset generate_pair(const PairSpec& spec);

}  // namespace simglyph::synthdata
