#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "feikit/bits.hpp"
#include "feikit/distribution.hpp"
#include "feikit/dyadic.hpp"
#include "feikit/errors.hpp"
#include "feikit/prng.hpp"
#include "feikit/truth_table.hpp"

namespace feikit {

/// In-place Walsh-Hadamard butterfly.  After the call, slot S holds
/// sum_j v[j] * (-1)^popcount(S & j).
inline void walsh_hadamard_inplace(std::span<std::int64_t> v) {
  for (std::size_t half = 1; half < v.size(); half <<= 1) {
    for (std::size_t block = 0; block < v.size(); block += 2 * half) {
      for (std::size_t k = block; k < block + half; ++k) {
        std::int64_t a = v[k], b = v[k + half];
        v[k] = a + b;
        v[k + half] = a - b;
      }
    }
  }
}

/// Exact Fourier spectrum of an n-variable function, stored as the integers
/// w(S) = f^(S) * 2^n.  For a +-1-valued f these satisfy sum_S w(S)^2 = 4^n
/// (Parseval) and |w(S)| <= 2^n.
class Spectrum {
 public:
  explicit Spectrum(int n) : n_(check_n(n)), w_(std::size_t{1} << n, 0) {}
  Spectrum(int n, std::vector<std::int64_t> scaled) : n_(check_n(n)), w_(std::move(scaled)) {
    if (w_.size() != (std::size_t{1} << n)) throw DomainError("spectrum: wrong table size");
    std::int64_t cap = std::int64_t{1} << n_;
    for (std::int64_t w : w_)
      if (w > cap || w < -cap)
        throw DomainError("spectrum: scaled coefficient exceeds 2^n in magnitude");
  }

  int n() const { return n_; }
  std::uint32_t size() const { return std::uint32_t{1} << n_; }

  std::int64_t scaled(Subset s) const { return w_[s]; }
  std::int64_t& scaled(Subset s) { return w_[s]; }
  const std::vector<std::int64_t>& scaled_all() const { return w_; }

  Dyadic coefficient(Subset s) const { return Dyadic::from_scaled(w_[s], n_); }

  /// f^(S)^2 as an exact dyadic rational.
  Dyadic squared_mass(Subset s) const {
    return Dyadic(mpz_class(static_cast<long>(w_[s])) * static_cast<long>(w_[s]), 2u * n_);
  }

  std::vector<Subset> support() const {
    std::vector<Subset> out;
    for (Subset s = 0; s < size(); ++s)
      if (w_[s] != 0) out.push_back(s);
    return out;
  }

  /// Parseval: sum_S w(S)^2 == 4^n, exactly.  The construction invariant
  /// |w| <= 2^n <= 2^20 keeps every term and the sum inside 64 bits.
  bool parseval_holds() const {
    std::uint64_t acc = 0;
    for (auto w : w_) acc += static_cast<std::uint64_t>(w * w);
    return acc == (std::uint64_t{1} << (2 * n_));
  }

  /// Shannon entropy (base 2) of the spectral distribution {f^(S)^2},
  /// with 0*log(1/0) = 0.  Requires a normalized spectrum.
  double spectral_entropy() const {
    if (!parseval_holds())
      throw DomainError("spectral_entropy: spectrum is not normalized");
    double h = 0.0;
    double scale = std::ldexp(1.0, -2 * n_);  // 4^-n
    for (auto w : w_) {
      if (w == 0) continue;
      double p = static_cast<double>(w) * static_cast<double>(w) * scale;
      h -= p * std::log2(p);
    }
    return h;
  }

  /// Inverse transform: applying the butterfly twice divides by 2^n.
  /// Throws if the result is not a +-1-valued table.
  TruthTable inverse_truth_table() const {
    std::vector<std::int64_t> v = w_;
    walsh_hadamard_inplace(v);
    TruthTable t(n_);
    std::int64_t full = std::int64_t{1} << n_;
    for (std::uint32_t j = 0; j < size(); ++j) {
      if (v[j] == full)
        t.set(j, +1);
      else if (v[j] == -full)
        t.set(j, -1);
      else
        throw DomainError("inverse_truth_table: spectrum is not a +-1-valued function");
    }
    return t;
  }

  /// CSV export, one row per nonzero coefficient: mask,numerator,log2_denominator.
  void write_csv(std::ostream& out) const {
    out << "mask,numerator,log2_denominator\n";
    for (Subset s = 0; s < size(); ++s) {
      if (w_[s] == 0) continue;
      Dyadic c = coefficient(s);
      out << s << "," << c.numerator().get_str() << "," << c.log2_denominator() << "\n";
    }
  }

 private:
  static int check_n(int n) {
    if (n < 1 || n > kMaxVars)
      throw DomainError("spectrum: variable count must be in [1, " + std::to_string(kMaxVars) +
                        "]");
    return n;
  }

  int n_;
  std::vector<std::int64_t> w_;
};

/// Exact Fourier transform via the fast Walsh-Hadamard butterfly, O(n 2^n)
/// integer operations.
inline Spectrum fourier_transform(const TruthTable& f) {
  std::vector<std::int64_t> v(f.num_inputs());
  for (std::uint32_t j = 0; j < f.num_inputs(); ++j) v[j] = f.eval(j);
  walsh_hadamard_inplace(v);
  return Spectrum(f.n(), std::move(v));
}

/// Exact sampler for the spectral distribution: S is drawn with probability
/// w(S)^2 / 4^n using cumulative integer thresholds and a 2n-bit uniform
/// draw, so the sampling probabilities are exact.
class SpectralSampler {
 public:
  explicit SpectralSampler(const Spectrum& spec) : bits_(2 * spec.n()) {
    std::uint64_t acc = 0;
    for (Subset s = 0; s < spec.size(); ++s) {
      std::int64_t w = spec.scaled(s);
      if (w == 0) continue;
      acc += static_cast<std::uint64_t>(w * w);
      cum_.push_back(acc);
      outcome_.push_back(s);
    }
    if (acc != (std::uint64_t{1} << bits_))
      throw DomainError("spectral sampler: spectrum is not normalized");
  }

  Subset sample(SplitMix64& rng) const {
    std::uint64_t r = rng.bits(bits_);  // uniform on [0, 4^n), exact
    auto it = std::upper_bound(cum_.begin(), cum_.end(), r);
    return outcome_[static_cast<std::size_t>(it - cum_.begin())];
  }

 private:
  int bits_;
  std::vector<std::uint64_t> cum_;
  std::vector<Subset> outcome_;
};

inline Subset spectral_sample(const Spectrum& spec, SplitMix64& rng) {
  return SpectralSampler(spec).sample(rng);
}

/// The spectral distribution conditioned on S != {}:
/// Pr[Y=S] = f^(S)^2 / (1 - f^({})^2).  Masses are exact rationals.
/// Throws for constant functions (f^({})^2 = 1), where the conditional
/// law does not exist.
inline Distribution<Subset> conditional_nonempty(const Spectrum& spec) {
  mpz_class var_num = 0;  // (1 - f^({})^2) * 4^n
  for (Subset s = 1; s < spec.size(); ++s) {
    std::int64_t w = spec.scaled(s);
    var_num += mpz_class(static_cast<long>(w)) * static_cast<long>(w);
  }
  if (var_num == 0)
    throw DomainError("conditional_nonempty: constant function has no nonempty spectral sample");
  Distribution<Subset> d;
  for (Subset s = 1; s < spec.size(); ++s) {
    std::int64_t w = spec.scaled(s);
    if (w == 0) continue;
    mpq_class m(mpz_class(static_cast<long>(w)) * static_cast<long>(w), var_num);
    m.canonicalize();
    d.atoms.emplace_back(s, std::move(m));
  }
  return d;
}

}  // namespace feikit
