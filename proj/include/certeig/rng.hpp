#pragma once

#include <cmath>
#include <cstdint>

namespace certeig {

// Counter-based generator (SplitMix64 finalizer applied to seed/stream/counter).
// Every draw is addressed by (stream, counter), so results are reproducible
// across platforms and independent of evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t z = mix(seed_ + 0x9E3779B97F4A7C15ULL * (stream + 1));
    z = mix(z + 0x9E3779B97F4A7C15ULL * (counter + 1));
    return z;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t stream, std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(stream, counter);
  }

  // Standard normal via Box-Muller; consumes counters 2i and 2i+1.
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    double u1 = uniform(stream, 2 * counter);
    double u2 = uniform(stream, 2 * counter + 1);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derive a child seed, e.g. one per (grid point, trial).
  std::uint64_t derive(std::uint64_t stream, std::uint64_t counter) const {
    return bits(stream, counter);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
};

}  // namespace certeig
