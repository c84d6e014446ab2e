#pragma once

#include <cmath>
#include <cstdint>

namespace jdpp {

inline std::uint64_t splitmix64_next(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// xoshiro256** (Blackman/Vigna, public domain), seeded through splitmix64.
///
/// Fully specified 64-bit generator: the same seed produces the same stream
/// on every platform. Uniform doubles take the top 53 bits, so neither
/// next() nor uniform01() touches libm; `normal()` does (Box-Muller) and is
/// only used by test-data generators, never by the sampler.
///
/// Stream splitting: `split(k)` derives a child generator from the
/// construction seed and the stream index alone. It does not depend on how
/// many values the parent has produced, so `Rng(s).split(k)` is a stable
/// address for substream k of seed s.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64_next(s);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Integer in [0, n). n must be > 0; modulo bias is irrelevant at the
  /// sizes used here (n <= 2^32).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  double normal() {
    // Box-Muller, no spare caching: two uniforms per call keeps the
    // draw count deterministic and position-independent.
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t seed() const { return seed_; }

  Rng split(std::uint64_t stream) const {
    std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    const std::uint64_t mixed = splitmix64_next(s);
    return Rng(mixed);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace jdpp
