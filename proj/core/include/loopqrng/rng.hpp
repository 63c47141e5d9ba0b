#pragma once

#include <cstdint>

namespace loopqrng::rng {

// Counter-based 64-bit generator: output k of stream `seed` is the
// splitmix64 finalizer applied to seed + (k+1)*golden-gamma. Any slot can
// be evaluated independently, so chunked or parallel generation produces
// the same stream as a sequential pass.
//
// The (seed, index) -> word mapping is format-frozen: seeded artifacts
// (event streams, extractor seed bits, test fixtures) depend on it.

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * kGamma);
}

/// Map a word to [0, 1) using the top 53 bits.
constexpr double to_unit(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Bit k of the stream, MSB-first within each 64-bit word.
constexpr int bit_at(std::uint64_t seed, std::uint64_t k) {
  return static_cast<int>((at(seed, k >> 6) >> (63 - (k & 63))) & 1u);
}

/// Sequential convenience wrapper over the counter scheme.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next() { return at(seed_, index_++); }
  double next_unit() { return to_unit(next()); }

  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    std::uint64_t w;
    do {
      w = next();
    } while (w >= limit);
    return w % bound;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t index_ = 0;
};

}  // namespace loopqrng::rng
