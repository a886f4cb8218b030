#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "feikit/bits.hpp"
#include "feikit/errors.hpp"
#include "feikit/prng.hpp"

namespace feikit {

/// Packed evaluation table of a function f : {-1,1}^n -> {-1,1}, 1 <= n <= 20.
///
/// Bit j of the table is 1 iff f(x_j) = -1, where bit i of the index j is 1
/// iff x_{i+1} = -1.  This input-index convention is fixed across the whole
/// library and its file formats.
class TruthTable {
 public:
  explicit TruthTable(int n, int fill = +1) : n_(check_n(n)) {
    words_.assign(word_count(), fill == -1 ? ~0ull : 0ull);
    mask_top();
  }

  static TruthTable constant(int n, int value) { return TruthTable(n, value); }

  static TruthTable dictator(int n, int var) {
    TruthTable t(n);
    int b = var - 1;
    for (std::size_t w = 0; w < t.words_.size(); ++w)
      t.words_[w] = variable_word_mask(b, w);
    t.mask_top();
    return t;
  }

  /// Parity over the variables in `mask` (chi_S): -1 iff an odd number of
  /// them are -1.
  static TruthTable parity(int n, Subset mask) {
    TruthTable t(n);
    for (std::uint32_t j = 0; j < t.num_inputs(); ++j)
      if (popcount(j & mask) & 1) t.set(j, -1);
    return t;
  }

  static TruthTable majority3() {
    TruthTable t(3);
    for (std::uint32_t j = 0; j < 8; ++j)
      if (popcount(j) >= 2) t.set(j, -1);  // at least two inputs are -1
    return t;
  }

  /// -1 iff every input is -1.
  static TruthTable and_all(int n) {
    TruthTable t(n);
    t.set(t.num_inputs() - 1, -1);
    return t;
  }

  /// -1 iff at least one input is -1.
  static TruthTable or_all(int n) {
    TruthTable t(n, -1);
    t.set(0, +1);
    return t;
  }

  static TruthTable from_words(int n, std::vector<std::uint64_t> words) {
    TruthTable t(n);
    if (words.size() != t.words_.size()) throw DomainError("from_words: wrong word count");
    t.words_ = std::move(words);
    t.mask_top();
    return t;
  }

  static TruthTable random(int n, SplitMix64& rng) {
    TruthTable t(n);
    for (auto& w : t.words_) w = rng.next();
    t.mask_top();
    return t;
  }

  /// Exactly half the inputs map to -1.
  static TruthTable random_balanced(int n, SplitMix64& rng) {
    TruthTable t(n);
    std::uint32_t size = t.num_inputs();
    std::vector<std::uint32_t> idx(size);
    for (std::uint32_t j = 0; j < size; ++j) idx[j] = j;
    for (std::uint32_t j = 0; j < size / 2; ++j) {
      std::uint32_t r = j + static_cast<std::uint32_t>(rng.below(size - j));
      std::swap(idx[j], idx[r]);
      t.set(idx[j], -1);
    }
    return t;
  }

  int n() const { return n_; }
  std::uint32_t num_inputs() const { return std::uint32_t{1} << n_; }

  int eval(std::uint32_t x) const {
    return ((words_[x >> 6] >> (x & 63)) & 1u) ? -1 : +1;
  }

  void set(std::uint32_t x, int value) {
    std::uint64_t bit = std::uint64_t{1} << (x & 63);
    if (value == -1)
      words_[x >> 6] |= bit;
    else
      words_[x >> 6] &= ~bit;
  }

  std::uint64_t minus_count() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += popcount(w);
    return c;
  }

  bool is_constant() const {
    std::uint64_t c = minus_count();
    return c == 0 || c == num_inputs();
  }

  bool is_balanced() const { return 2 * minus_count() == num_inputs(); }

  /// Table of x -> f(x ^ e_i): variable i (1-indexed) negated.
  TruthTable flip_variable(int var) const {
    check_var(var);
    TruthTable r(n_);
    int b = var - 1;
    if (b < 6) {
      int s = 1 << b;
      for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t m = variable_word_mask(b, w);
        r.words_[w] = ((words_[w] & m) >> s) | ((words_[w] & ~m) << s);
      }
    } else {
      std::size_t d = std::size_t{1} << (b - 6);
      for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] = words_[w ^ d];
    }
    return r;
  }

  /// The balancing trick: g(x, x_{n+1}) = x_{n+1} * f(x) on n+1 variables.
  /// g is balanced, has the same spectral entropy as f, and Inf[g] = Inf[f]+1.
  TruthTable balanced_extension() const {
    if (n_ + 1 > kMaxVars)
      throw DomainError("balanced_extension: would exceed " + std::to_string(kMaxVars) + " variables");
    TruthTable g(n_ + 1);
    for (std::uint32_t j = 0; j < num_inputs(); ++j) {
      g.set(j, eval(j));                        // x_{n+1} = +1
      g.set(j | num_inputs(), -eval(j));        // x_{n+1} = -1
    }
    return g;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const TruthTable& o) const {
    return n_ == o.n_ && words_ == o.words_;
  }

  /// File format: line 1 "n=<int>", line 2 the 2^n bits as a hex string,
  /// most-significant nibble first (nibble t covers bits 4t..4t+3).
  void write(std::ostream& out) const {
    out << "n=" << n_ << "\n";
    int digits = static_cast<int>((num_inputs() + 3) / 4);
    std::string s(digits, '0');
    for (int t = 0; t < digits; ++t) {
      unsigned nib = 0;
      for (int b = 0; b < 4; ++b) {
        std::uint32_t j = static_cast<std::uint32_t>(4 * t + b);
        if (j < num_inputs() && eval(j) == -1) nib |= 1u << b;
      }
      s[digits - 1 - t] = "0123456789abcdef"[nib];
    }
    out << s << "\n";
  }

  static TruthTable read(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("truth table: missing header line");
    if (line.rfind("n=", 0) != 0) throw ParseError("truth table: expected 'n=<int>' header");
    int n = 0;
    try {
      n = std::stoi(line.substr(2));
    } catch (...) {
      throw ParseError("truth table: bad variable count '" + line + "'");
    }
    check_n(n);
    std::string hex;
    if (!std::getline(in, hex)) throw ParseError("truth table: missing hex line");
    while (!hex.empty() && (hex.back() == '\r' || hex.back() == ' ')) hex.pop_back();
    TruthTable t(n);
    std::size_t digits = (t.num_inputs() + 3) / 4;
    if (hex.size() != digits)
      throw ParseError("truth table: expected " + std::to_string(digits) + " hex digits, got " +
                       std::to_string(hex.size()));
    for (std::size_t p = 0; p < digits; ++p) {
      char c = hex[p];
      unsigned nib;
      if (c >= '0' && c <= '9')
        nib = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f')
        nib = static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F')
        nib = static_cast<unsigned>(c - 'A' + 10);
      else
        throw ParseError(std::string("truth table: bad hex digit '") + c + "'");
      std::size_t t0 = digits - 1 - p;
      for (int b = 0; b < 4; ++b) {
        std::uint32_t j = static_cast<std::uint32_t>(4 * t0 + b);
        if (j < t.num_inputs()) {
          if (nib & (1u << b)) t.set(j, -1);
        } else if (nib & (1u << b)) {
          throw ParseError("truth table: bits set beyond 2^n");
        }
      }
    }
    return t;
  }

 private:
  static int check_n(int n) {
    if (n < 1 || n > kMaxVars)
      throw DomainError("variable count must be in [1, " + std::to_string(kMaxVars) + "], got " +
                        std::to_string(n));
    return n;
  }
  void check_var(int var) const {
    if (var < 1 || var > n_)
      throw DomainError("variable index " + std::to_string(var) + " out of range [1, " +
                        std::to_string(n_) + "]");
  }
  std::size_t word_count() const {
    return n_ <= 6 ? 1 : (std::size_t{1} << (n_ - 6));
  }
  void mask_top() {
    if (n_ < 6) words_[0] &= (std::uint64_t{1} << num_inputs()) - 1;
  }

  int n_;
  std::vector<std::uint64_t> words_;
};

}  // namespace feikit
