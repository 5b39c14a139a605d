#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "simglyph/geometry.hpp"
#include "simglyph/imagecore.hpp"

namespace simglyph::cli {

// Runs one CLI invocation (args exclude the program name). Returns the
// process exit code; errors print a single diagnostic line to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// One dataset manifest row: a labeled sample file with an optional
// ground-truth rectangle (all -1 when absent).
struct ManifestEntry {
  int class_id = -1;
  std::filesystem::path file;  // resolved against the manifest directory
  Rect truth{-1, -1, -1, -1};

  bool has_truth() const { return truth.w > 0 && truth.h > 0; }
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Loads a sample raster (PGM or text raster by extension).
imagecore::GlyphImage load_sample(const std::filesystem::path& path);

}  // namespace simglyph::cli
