#pragma once

// Seeded random streams. Every consumer derives an independent substream
// from (seed, key...) so results do not depend on evaluation order or on
// how work is split across threads.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace pagerel {

// FNV-1a, stable across platforms (std::hash is not).
constexpr uint64_t HashString(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(SplitMix64(seed)) {}

  // Substream keyed by `seed` and an ordered list of keys.
  static Rng Substream(uint64_t seed, std::initializer_list<uint64_t> keys) {
    uint64_t state = SplitMix64(seed);
    for (uint64_t k : keys) state = SplitMix64(state ^ SplitMix64(k));
    return Rng(state);
  }

  uint64_t Next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); n > 0.
  uint64_t Below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    uint64_t r;
    do {
      r = Next();
    } while (r < threshold);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pagerel
