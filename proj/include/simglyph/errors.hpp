#pragma once

#include <stdexcept>
#include <string>

namespace simglyph {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input raster has no foreground pixels.
class EmptyGlyphError : public Error {
 public:
  using Error::Error;
};

// Not enough data to perform the requested fit (e.g. k > number of points).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Window or coordinate outside the valid domain.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Label set contains a single class where two are required.
class DegenerateLabelsError : public Error {
 public:
  using Error::Error;
};

// Infeasible or inconsistent generator specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Inconsistent run configuration (missing model, mismatched dims, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace simglyph
