#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <utility>

#include "feikit/errors.hpp"

namespace feikit {

/// Exact dyadic rational num / 2^exp with arbitrary-precision numerator,
/// kept in reduced form (numerator odd, or zero with exponent 0).
///
/// Every quantity this library manipulates except entropies is exactly
/// dyadic: Fourier coefficients and their squares, influences, variances,
/// covariances, path probabilities, expected depths.  Keeping them dyadic
/// lets the test suites assert equality instead of closeness.
class Dyadic {
 public:
  Dyadic() : num_(0), exp_(0) {}
  Dyadic(long v) : num_(v), exp_(0) {}  // NOLINT: implicit by design
  Dyadic(mpz_class num, unsigned log2_den) : num_(std::move(num)), exp_(log2_den) {
    normalize();
  }

  static Dyadic from_scaled(std::int64_t num, unsigned log2_den) {
    return Dyadic(mpz_class(static_cast<long>(num)), log2_den);
  }

  const mpz_class& numerator() const { return num_; }
  unsigned log2_denominator() const { return exp_; }

  bool is_zero() const { return num_ == 0; }
  int sign() const { return sgn(num_); }

  Dyadic operator-() const {
    Dyadic r;
    r.num_ = -num_;
    r.exp_ = exp_;
    return r;
  }

  Dyadic operator+(const Dyadic& o) const {
    unsigned e = std::max(exp_, o.exp_);
    mpz_class a = num_ << (e - exp_);
    mpz_class b = o.num_ << (e - o.exp_);
    return Dyadic(a + b, e);
  }

  Dyadic operator-(const Dyadic& o) const { return *this + (-o); }

  Dyadic operator*(const Dyadic& o) const {
    return Dyadic(num_ * o.num_, exp_ + o.exp_);
  }

  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  /// Exact division by a power of two.
  Dyadic halved(unsigned k = 1) const { return Dyadic(num_, exp_ + k); }

  std::strong_ordering operator<=>(const Dyadic& o) const {
    unsigned e = std::max(exp_, o.exp_);
    mpz_class a = num_ << (e - exp_);
    mpz_class b = o.num_ << (e - o.exp_);
    int c = cmp(a, b);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  bool operator==(const Dyadic& o) const {
    return exp_ == o.exp_ && num_ == o.num_;
  }

  mpq_class to_mpq() const {
    mpq_class q(num_, mpz_class(1) << exp_);
    q.canonicalize();
    return q;
  }

  double to_double() const { return to_mpq().get_d(); }

  std::string to_string() const {
    if (exp_ == 0) return num_.get_str();
    return num_.get_str() + "/2^" + std::to_string(exp_);
  }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    if (exp_ == 0) return;
    unsigned tz = static_cast<unsigned>(mpz_scan1(num_.get_mpz_t(), 0));
    unsigned s = std::min(tz, exp_);
    if (s > 0) {
      num_ >>= s;
      exp_ -= s;
    }
  }

  mpz_class num_;
  unsigned exp_;
};

inline Dyadic operator*(long a, const Dyadic& d) { return Dyadic(a) * d; }

}  // namespace feikit
