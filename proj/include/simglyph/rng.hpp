#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace simglyph {

// Deterministic RNG wrapper. std::uniform_int_distribution and friends are
// implementation-defined, so all mappings from raw engine output to values
// are spelled out here; identical seeds give identical streams everywhere
// the same build runs.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // Index in [0, n); n must be > 0.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  // Integer in [lo, hi] inclusive.
  int range(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
  }

  // Real in [0, 1).
  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double real(double lo, double hi) { return lo + (hi - lo) * real(); }

  // Fisher-Yates shuffle with this engine.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // First n indices of a shuffled [0, total) range.
  std::vector<std::size_t> sample_indices(std::size_t total, std::size_t n) {
    std::vector<std::size_t> idx(total);
    for (std::size_t i = 0; i < total; ++i) idx[i] = i;
    shuffle(idx);
    if (n < total) idx.resize(n);
    return idx;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace simglyph
