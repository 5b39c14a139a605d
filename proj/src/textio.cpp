#include "simglyph/textio.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "simglyph/errors.hpp"

namespace simglyph::textio {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::string fmt_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---- PGM ----

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istringstream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(static_cast<char>(c));
    while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(in.get()));
    return tok;
  }
  throw FormatError("truncated PGM header");
}

}  // namespace

imagecore::GlyphImage read_pgm(const fs::path& path) {
  std::string bytes = read_file(path);
  std::istringstream in(bytes);
  if (pgm_token(in) != "P5") throw FormatError(path.string() + ": not a P5 PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pgm_token(in));
    h = std::stoi(pgm_token(in));
    maxval = std::stoi(pgm_token(in));
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": bad PGM header");
  }
  if (w <= 0 || h <= 0) throw FormatError(path.string() + ": bad PGM dimensions");
  if (maxval != 255) throw FormatError(path.string() + ": PGM maxval must be 255");
  in.get();  // single whitespace after maxval
  imagecore::GlyphImage img(w, h);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    int c = in.get();
    if (c == EOF) throw FormatError(path.string() + ": truncated PGM data");
    img.pixels[i] = (c < 128) ? 1 : 0;
  }
  return img;
}

namespace {

std::string pgm_bytes(const imagecore::GlyphImage& img,
                      const Rect* mark) {
  std::ostringstream out;
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      unsigned char v = img.at(x, y) ? 0 : 255;
      if (mark) {
        bool on_border =
            (x >= mark->x && x < mark->x + mark->w && (y == mark->y || y == mark->y + mark->h - 1)) ||
            (y >= mark->y && y < mark->y + mark->h && (x == mark->x || x == mark->x + mark->w - 1));
        if (on_border) v = 128;
      }
      out.put(static_cast<char>(v));
    }
  }
  return out.str();
}

}  // namespace

void write_pgm(const fs::path& path, const imagecore::GlyphImage& img) {
  write_file_atomic(path, pgm_bytes(img, nullptr));
}

void write_pgm_overlay(const fs::path& path, const imagecore::GlyphImage& img, const Rect& mark) {
  write_file_atomic(path, pgm_bytes(img, &mark));
}

// ---- text raster ----

imagecore::GlyphImage parse_text_raster(const std::string& content) {
  std::vector<std::string> lines;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw FormatError("empty text raster");
  const size_t w = lines[0].size();
  imagecore::GlyphImage img(static_cast<int>(w), static_cast<int>(lines.size()));
  for (size_t y = 0; y < lines.size(); ++y) {
    if (lines[y].size() != w) throw FormatError("ragged text raster");
    for (size_t x = 0; x < w; ++x) {
      char c = lines[y][x];
      if (c != '0' && c != '1') throw FormatError("text raster characters must be '0' or '1'");
      img.pixels[y * w + x] = (c == '1') ? 1 : 0;
    }
  }
  return img;
}

imagecore::GlyphImage read_text_raster(const fs::path& path) {
  return parse_text_raster(read_file(path));
}

std::string text_raster_string(const imagecore::GlyphImage& img) {
  std::string out;
  out.reserve(static_cast<size_t>(img.height) * (img.width + 1));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) out.push_back(img.at(x, y) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

// ---- CSV ----

std::string csv_string(const std::vector<CsvRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += row[i];
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const fs::path& path, const std::vector<CsvRow>& rows) {
  write_file_atomic(path, csv_string(rows));
}

std::vector<CsvRow> parse_csv(const std::string& content) {
  std::vector<CsvRow> rows;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    CsvRow row;
    std::string field;
    for (char c : line) {
      if (c == ',') {
        row.push_back(field);
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    row.push_back(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CsvRow> read_csv(const fs::path& path) {
  return parse_csv(read_file(path));
}

// ---- key=value ----

std::map<std::string, std::string> parse_kv(const std::string& content) {
  std::map<std::string, std::string> kv;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("key=value file, line " + std::to_string(lineno) + ": missing '='");
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t");
      size_t b = s.find_last_not_of(" \t");
      if (a == std::string::npos) return std::string();
      return s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string kv_string(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  for (const auto& [k, v] : entries) {
    out += k;
    out.push_back('=');
    out += v;
    out.push_back('\n');
  }
  return out;
}

}  // namespace simglyph::textio
