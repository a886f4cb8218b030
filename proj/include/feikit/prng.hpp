#pragma once

#include <cstdint>

namespace feikit {

/// SplitMix64.  Chosen because the entire output stream is a pure function
/// of the 64-bit seed, the generator is trivially splittable (seed ^ index),
/// and the implementation is identical on every platform, which keeps
/// reports byte-reproducible.  Standard-library distributions are avoided
/// for the same reason.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Exact uniform draw from [0, 2^k), k <= 64.
  std::uint64_t bits(int k) {
    if (k == 0) return 0;
    return next() >> (64 - k);
  }

  /// Uniform draw from [0, bound) by modular reduction.  The modulo bias is
  /// below bound/2^64; all bounds used here are < 2^41, so the bias is under
  /// 2^-23 and invisible to the statistical tolerances in the test suites.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Per-trial derived seed: seed XOR trial index.  SplitMix64's output
/// scrambler makes adjacent states produce independent-looking streams.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return seed ^ trial;
}

}  // namespace feikit
