#pragma once

#include <bit>
#include <cstdint>

namespace feikit {

/// Subsets of variables {1..n} as n-bit masks: bit i-1 set <=> variable i in S.
using Subset = std::uint32_t;

/// Truth tables are indexed by input masks j where bit i of j is 1 iff
/// x_{i+1} = -1 (variables are 1-indexed throughout).
inline constexpr int kMaxVars = 20;

inline int popcount(std::uint64_t x) { return std::popcount(x); }

inline bool subset_contains(Subset s, int var) {
  return (s >> (var - 1)) & 1u;
}

inline Subset subset_without(Subset s, int var) {
  return s & ~(Subset{1} << (var - 1));
}

inline Subset subset_with(Subset s, int var) {
  return s | (Subset{1} << (var - 1));
}

/// Patterns of the form "bit j set iff bit b of j is set", chunked into
/// 64-bit words.  For b < 6 the pattern repeats inside each word; for
/// b >= 6 whole words are all-ones or all-zeros.
inline std::uint64_t variable_word_mask(int b, std::uint64_t word_index) {
  static constexpr std::uint64_t kIntra[6] = {
      0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
      0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull};
  if (b < 6) return kIntra[b];
  return ((word_index >> (b - 6)) & 1u) ? ~0ull : 0ull;
}

}  // namespace feikit
