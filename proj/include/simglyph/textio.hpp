#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "simglyph/imagecore.hpp"

namespace simglyph::textio {

std::string read_file(const std::filesystem::path& path);

// Writes via a temporary file in the same directory followed by a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip-stable formatting used across all text artifacts:
// 9 significant digits.
std::string fmt_g9(double v);

// FNV-1a 64-bit over the bytes of s.
uint64_t fnv1a(const std::string& s);
std::string hex64(uint64_t v);

// ---- binary glyph rasters ----

// P5 PGM, maxval 255; a pixel is foreground iff its value is < 128.
imagecore::GlyphImage read_pgm(const std::filesystem::path& path);
// Foreground written as 0 (ink), background as 255.
void write_pgm(const std::filesystem::path& path, const imagecore::GlyphImage& img);
// Same image with an overlay byte (e.g. 128 for a marked rectangle border).
void write_pgm_overlay(const std::filesystem::path& path, const imagecore::GlyphImage& img,
                       const Rect& mark);

// Plain-text raster: one row per line, characters '0'/'1'.
imagecore::GlyphImage read_text_raster(const std::filesystem::path& path);
imagecore::GlyphImage parse_text_raster(const std::string& content);
std::string text_raster_string(const imagecore::GlyphImage& img);

// ---- CSV (no quoting; fields must not contain commas or newlines) ----

using CsvRow = std::vector<std::string>;

std::string csv_string(const std::vector<CsvRow>& rows);
void write_csv(const std::filesystem::path& path, const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(const std::string& content);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

// ---- flat key=value files ----

std::map<std::string, std::string> parse_kv(const std::string& content);
std::string kv_string(const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace simglyph::textio
