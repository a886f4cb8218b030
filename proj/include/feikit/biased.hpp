#pragma once

#include <gmpxx.h>

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "feikit/bits.hpp"
#include "feikit/distribution.hpp"
#include "feikit/errors.hpp"
#include "feikit/spectrum.hpp"
#include "feikit/truth_table.hpp"

namespace feikit {

/// Per-variable expectations mu_i in (-1, 1) defining a product distribution:
/// Pr[x_i = 1] = (1 + mu_i)/2.  Biases are exact rationals end to end.
struct BiasVector {
  std::vector<mpq_class> mu;  // mu[i-1] is the bias of variable i

  static BiasVector zeros(int n) {
    BiasVector b;
    b.mu.assign(static_cast<std::size_t>(n), mpq_class(0));
    return b;
  }

  int n() const { return static_cast<int>(mu.size()); }

  const mpq_class& bias(int var) const { return mu[static_cast<std::size_t>(var - 1)]; }

  /// sigma_i^2 = Var[x_i] = 1 - mu_i^2.
  mpq_class sigma_sq(int var) const {
    const mpq_class& m = bias(var);
    return 1 - m * m;
  }

  mpq_class sigma_sq_product(Subset s) const {
    mpq_class p = 1;
    for (int i = 1; i <= n(); ++i)
      if (subset_contains(s, i)) p *= sigma_sq(i);
    return p;
  }

  void validate() const {
    for (const auto& m : mu)
      if (abs(m) >= 1) throw DomainError("bias: |mu_i| must be strictly below 1");
  }

  /// Probability of the input point x under the product measure, exact.
  mpq_class point_weight(std::uint32_t x) const {
    mpq_class w = 1;
    for (int i = 1; i <= n(); ++i) {
      // bit i-1 of x set <=> x_i = -1
      if ((x >> (i - 1)) & 1u)
        w *= (1 - bias(i)) / 2;
      else
        w *= (1 + bias(i)) / 2;
    }
    return w;
  }

  /// CSV: one "i,numerator,denominator" row per variable.
  void write_csv(std::ostream& out) const {
    out << "i,numerator,denominator\n";
    for (int i = 1; i <= n(); ++i)
      out << i << "," << bias(i).get_num().get_str() << "," << bias(i).get_den().get_str()
          << "\n";
  }

  static BiasVector read_csv(std::istream& in, int n) {
    BiasVector b = zeros(n);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("bias csv: empty input");
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      std::size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos)
        throw ParseError("bias csv: expected 'i,numerator,denominator'");
      int i = 0;
      try {
        i = std::stoi(line.substr(0, c1));
      } catch (...) {
        throw ParseError("bias csv: bad variable index");
      }
      if (i < 1 || i > n) throw ParseError("bias csv: variable index out of range");
      mpq_class v;
      try {
        v = mpq_class(mpz_class(line.substr(c1 + 1, c2 - c1 - 1)),
                      mpz_class(line.substr(c2 + 1)));
        v.canonicalize();
      } catch (...) {
        throw ParseError("bias csv: bad rational");
      }
      b.mu[static_cast<std::size_t>(i - 1)] = v;
    }
    b.validate();
    return b;
  }
};

/// mu-biased Fourier expansion.  The orthonormal basis is
///   phi_S(x) = prod_{i in S} (x_i - mu_i)/sigma_i,  sigma_i = sqrt(1-mu_i^2),
/// under which Parseval holds: sum_S ft(S)^2 = E_mu[f^2] = 1.
///
/// sigma_i is irrational in general, so the class stores the exact rational
/// coefficients a(S) of the monomial expansion f = sum_S a(S) psi_S with
/// psi_S = prod_{i in S}(x_i - mu_i).  Then ft(S) = a(S) * prod sigma_i:
/// squared coefficients and every quantity built from them stay exact
/// rationals; only log/entropy evaluations drop to double.
class BiasedSpectrum {
 public:
  BiasedSpectrum(int n, BiasVector bias, std::vector<mpq_class> raw)
      : n_(n), bias_(std::move(bias)), a_(std::move(raw)) {}

  int n() const { return n_; }
  std::uint32_t size() const { return std::uint32_t{1} << n_; }
  const BiasVector& bias() const { return bias_; }

  /// a(S): the coefficient of psi_S, rational, same sign as ft(S).
  const mpq_class& raw(Subset s) const { return a_[s]; }

  /// ft(S)^2, exact.
  mpq_class squared(Subset s) const {
    return a_[s] * a_[s] * bias_.sigma_sq_product(s);
  }

  int sign(Subset s) const { return sgn(a_[s]); }

  /// ft(S) in double precision (exact when S = {}).
  double coefficient(Subset s) const {
    return a_[s].get_d() * std::sqrt(bias_.sigma_sq_product(s).get_d());
  }

  mpq_class mean() const { return a_[0]; }

  /// Var_mu[f] = 1 - ft({})^2, exact.
  mpq_class variance() const { return 1 - a_[0] * a_[0]; }

  bool parseval_holds() const {
    mpq_class total = 0;
    for (Subset s = 0; s < size(); ++s) total += squared(s);
    return total == 1;
  }

  /// Pr[i in Y] for Y ~ ft^2 \ {}, exact.
  mpq_class marginal(int var) const {
    mpq_class var_f = variance();
    if (var_f == 0) throw DomainError("marginal: constant function under mu");
    mpq_class num = 0;
    for (Subset s = 0; s < size(); ++s)
      if (subset_contains(s, var)) num += squared(s);
    return num / var_f;
  }

  /// E|Y| for Y ~ ft^2 \ {}, exact.
  mpq_class expected_size() const {
    mpq_class var_f = variance();
    if (var_f == 0) throw DomainError("expected_size: constant function under mu");
    mpq_class num = 0;
    for (Subset s = 1; s < size(); ++s) num += popcount(s) * squared(s);
    return num / var_f;
  }

  /// The conditioned sample law Pr[Y=S] = ft(S)^2 / Var_mu[f], S != {}.
  Distribution<Subset> conditional_nonempty() const {
    mpq_class var = variance();
    if (var == 0) throw DomainError("conditional_nonempty: constant function under mu");
    Distribution<Subset> d;
    for (Subset s = 1; s < size(); ++s) {
      mpq_class m = squared(s);
      if (m == 0) continue;
      d.atoms.emplace_back(s, m / var);
    }
    return d;
  }

 private:
  int n_;
  BiasVector bias_;
  std::vector<mpq_class> a_;
};

/// Exact biased transform by a per-variable butterfly: write f = A + x_i B
/// on each pair of sub-tables, and re-express in (1, x_i - mu_i):
/// f = (A + mu_i B) + B (x_i - mu_i).  O(n 2^n) rational operations.
/// At mu = 0 this is exactly the uniform transform.
inline BiasedSpectrum biased_fourier(const TruthTable& f, const BiasVector& bias) {
  if (bias.n() != f.n()) throw DomainError("biased_fourier: bias size does not match n");
  bias.validate();
  std::vector<mpq_class> v(f.num_inputs());
  for (std::uint32_t j = 0; j < f.num_inputs(); ++j) v[j] = f.eval(j);
  for (int i = 0; i < f.n(); ++i) {
    std::uint32_t bit = std::uint32_t{1} << i;
    const mpq_class& mu = bias.mu[static_cast<std::size_t>(i)];
    for (std::uint32_t j = 0; j < f.num_inputs(); ++j) {
      if (j & bit) continue;
      mpq_class plus = v[j];        // x_{i+1} = +1 slot
      mpq_class minus = v[j | bit];  // x_{i+1} = -1 slot
      mpq_class a = (plus + minus) / 2;
      mpq_class b = (plus - minus) / 2;
      v[j] = a + mu * b;
      v[j | bit] = b;
    }
  }
  return BiasedSpectrum(f.n(), bias, std::move(v));
}

/// E_mu[f], exact (independent summation route, for cross-checks).
inline mpq_class biased_mean(const TruthTable& f, const BiasVector& bias) {
  mpq_class e = 0;
  for (std::uint32_t j = 0; j < f.num_inputs(); ++j)
    e += bias.point_weight(j) * f.eval(j);
  return e;
}

/// The two sides of the biased entropy-influence inequality
///   sum_{S != {}} ft(S)^2 log( prod_{i in S}(1-mu_i^2) / ft(S)^2 )
///     <= C * sum_{S != {}} ft(S)^2 (|S| - 1).
/// The left side may be negative; raw values are reported unclamped.
struct FeiPlusSides {
  double lhs = 0;
  double rhs = 0;
};

inline FeiPlusSides fei_plus_sides(const BiasedSpectrum& spec) {
  if (spec.variance() == 0) throw DomainError("fei_plus_sides: constant function under mu");
  FeiPlusSides out;
  for (Subset s = 1; s < spec.size(); ++s) {
    mpq_class sq = spec.squared(s);
    if (sq == 0) continue;
    double p = sq.get_d();
    out.lhs += p * std::log2(spec.bias().sigma_sq_product(s).get_d() / p);
    out.rhs += p * (popcount(s) - 1);
  }
  return out;
}

/// Least C for which the inequality above holds: lhs/rhs when rhs > 0,
/// 0 when both sides vanish, +infinity when rhs = 0 but lhs > 0.
inline double min_fei_plus_constant(const BiasedSpectrum& spec, double tol = 1e-12) {
  FeiPlusSides s = fei_plus_sides(spec);
  if (s.rhs > tol) return s.lhs / s.rhs;
  return s.lhs <= tol ? 0.0 : std::numeric_limits<double>::infinity();
}

/// Right-hand side of the goodness inequality for a protocol on
/// Y ~ ft^2 \ {}:
///   E|P(Y)| <= C (E|Y| - 1) + sum_i Pr[i in Y] log2 1/(1-mu_i^2) + log2 Var_mu[f].
inline double goodness_budget(const BiasedSpectrum& spec, double c) {
  double rhs = c * (spec.expected_size().get_d() - 1.0);
  for (int i = 1; i <= spec.n(); ++i) {
    double m = spec.marginal(i).get_d();
    if (m > 0) rhs += m * std::log2(1.0 / spec.bias().sigma_sq(i).get_d());
  }
  rhs += std::log2(spec.variance().get_d());
  return rhs;
}

/// Checks that a prefix-free protocol with the given expected length is
/// C-good for f under its bias.
inline bool is_good_protocol(const BiasedSpectrum& spec, double expected_len, double c,
                             double tol = 1e-9) {
  return expected_len <= goodness_budget(spec, c) + tol;
}

/// Least C making the protocol C-good.  The inequality is linear in C with
/// coefficient E|Y| - 1 >= 0; when that coefficient vanishes the bound is
/// C-independent: 0 if it already holds, +infinity otherwise (reported, per
/// the contract, rather than thrown).
inline double min_good_constant(const BiasedSpectrum& spec, double expected_len,
                                double tol = 1e-9) {
  double base = goodness_budget(spec, 0.0);
  mpq_class denom_q = spec.expected_size() - 1;
  if (denom_q == 0)
    return expected_len <= base + tol ? 0.0 : std::numeric_limits<double>::infinity();
  return (expected_len - base) / denom_q.get_d();
}

}  // namespace feikit
