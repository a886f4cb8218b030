#pragma once

#include <cmath>
#include <cstdint>

#include "feikit/dyadic.hpp"
#include "feikit/errors.hpp"
#include "feikit/spectrum.hpp"
#include "feikit/truth_table.hpp"

namespace feikit {

inline Dyadic mean(const TruthTable& f) {
  // E[f] = (#(+1) - #(-1)) / 2^n = (2^n - 2*minus) / 2^n
  std::int64_t num = static_cast<std::int64_t>(f.num_inputs()) -
                     2 * static_cast<std::int64_t>(f.minus_count());
  return Dyadic::from_scaled(num, static_cast<unsigned>(f.n()));
}

inline Dyadic variance(const TruthTable& f) {
  Dyadic m = mean(f);
  return Dyadic(1) - m * m;  // E[f^2] = 1 for +-1-valued f
}

/// Inf_i[f] = Pr_x[f(x) != f(x ^ e_i)], computed by exact flip counting.
inline Dyadic influence(const TruthTable& f, int var) {
  if (var < 1 || var > f.n())
    throw DomainError("influence: variable index out of range");
  TruthTable flipped = f.flip_variable(var);
  std::uint64_t differing = 0;
  for (std::size_t w = 0; w < f.words().size(); ++w)
    differing += popcount(f.words()[w] ^ flipped.words()[w]);
  return Dyadic::from_scaled(static_cast<std::int64_t>(differing),
                             static_cast<unsigned>(f.n()));
}

inline Dyadic total_influence(const TruthTable& f) {
  Dyadic t;
  for (int i = 1; i <= f.n(); ++i) t += influence(f, i);
  return t;
}

// Spectral routes for the same quantities.

inline Dyadic mean(const Spectrum& s) { return s.coefficient(0); }

inline Dyadic variance(const Spectrum& s) {
  mpz_class acc = 0;  // sum over S != {} of w(S)^2
  for (Subset t = 1; t < s.size(); ++t) {
    std::int64_t w = s.scaled(t);
    acc += mpz_class(static_cast<long>(w)) * static_cast<long>(w);
  }
  return Dyadic(acc, 2u * s.n());
}

inline Dyadic influence(const Spectrum& s, int var) {
  if (var < 1 || var > s.n())
    throw DomainError("influence: variable index out of range");
  mpz_class acc = 0;  // sum over S containing var of w(S)^2
  for (Subset t = 0; t < s.size(); ++t) {
    if (!subset_contains(t, var)) continue;
    std::int64_t w = s.scaled(t);
    acc += mpz_class(static_cast<long>(w)) * static_cast<long>(w);
  }
  return Dyadic(acc, 2u * s.n());
}

inline Dyadic total_influence(const Spectrum& s) {
  mpz_class acc = 0;  // sum |S| * w(S)^2
  for (Subset t = 1; t < s.size(); ++t) {
    std::int64_t w = s.scaled(t);
    acc += mpz_class(popcount(t)) * (mpz_class(static_cast<long>(w)) * static_cast<long>(w));
  }
  return Dyadic(acc, 2u * s.n());
}

/// Cross-checks every moment against its Fourier-side formula, exactly:
/// E[f] = f^({}), Var[f] = sum_{S!={}} f^(S)^2, Inf_i by flip count equals
/// sum_{S m i} f^(S)^2 for every i, and Var[f] <= Inf[f].
inline bool moment_identities_hold(const TruthTable& f, const Spectrum& s) {
  if (mean(f) != mean(s)) return false;
  if (variance(f) != variance(s)) return false;
  Dyadic total;
  for (int i = 1; i <= f.n(); ++i) {
    if (influence(f, i) != influence(s, i)) return false;
    total += influence(f, i);
  }
  if (total != total_influence(s)) return false;
  return variance(f) <= total;
}

/// Binary entropy h(p) in bits, with 0 log(1/0) = 0.
inline double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

/// With eps defined by f^({})^2 = 1 - eps, checks 2*Inf[f] >= h(eps).
/// This holds for every +-1-valued f; tol covers the double-precision logs.
inline bool influence_entropy_bound_holds(const TruthTable& f, const Spectrum& s,
                                          double tol = 1e-12) {
  double eps = variance(s).to_double();  // 1 - f^({})^2
  double lhs = 2.0 * total_influence(f).to_double();
  return lhs >= binary_entropy(eps) - tol;
}

inline bool influence_entropy_bound_holds(const TruthTable& f, double tol = 1e-12) {
  return influence_entropy_bound_holds(f, fourier_transform(f), tol);
}

/// The elementary coding bound H[f^2] <= log2(3) * (ceil(log2 n) * Inf[f] + 1),
/// from the protocol that spells out each element of S with ceil(log2 n) bits
/// and terminates with a third symbol.
inline bool weak_entropy_bound_holds(const TruthTable& f, const Spectrum& s,
                                     double tol = 1e-9) {
  double h = s.spectral_entropy();
  int lg = 0;
  while ((1 << lg) < f.n()) ++lg;  // ceil(log2 n)
  double bound = std::log2(3.0) * (lg * total_influence(f).to_double() + 1.0);
  return h <= bound + tol;
}

}  // namespace feikit
