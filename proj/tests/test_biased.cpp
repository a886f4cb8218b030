#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "feikit/biased.hpp"
#include "feikit/boolfn.hpp"
#include "feikit/coding.hpp"
#include "feikit/harness.hpp"

using namespace feikit;

namespace {
BiasVector bias_of(std::vector<mpq_class> mu) {
  BiasVector b;
  b.mu = std::move(mu);
  b.validate();
  return b;
}
}  // namespace

TEST_CASE("bias vector validation and csv") {
  CHECK_THROWS_AS(bias_of({mpq_class(1)}), DomainError);
  CHECK_THROWS_AS(bias_of({mpq_class(-5, 4)}), DomainError);
  BiasVector b = bias_of({mpq_class(1, 2), mpq_class(-1, 3)});
  CHECK(b.sigma_sq(1) == mpq_class(3, 4));
  CHECK(b.sigma_sq(2) == mpq_class(8, 9));
  std::stringstream ss;
  b.write_csv(ss);
  CHECK(ss.str() == "i,numerator,denominator\n1,1,2\n2,-1,3\n");
  BiasVector back = BiasVector::read_csv(ss, 2);
  CHECK(back.mu == b.mu);
}

TEST_CASE("mu = 0 reduces exactly to the uniform transform") {
  TruthTable m = TruthTable::majority3();
  BiasedSpectrum bs = biased_fourier(m, BiasVector::zeros(3));
  Spectrum us = fourier_transform(m);
  for (Subset s = 0; s < 8; ++s) REQUIRE(bs.raw(s) == us.coefficient(s).to_mpq());
  REQUIRE(bs.parseval_holds());
}

TEST_CASE("dictator under bias: two-point expectation") {
  // f = x1: ftilde({}) = mu, ftilde({1})^2 = 1 - mu^2, Parseval exact
  for (mpq_class mu : {mpq_class(0), mpq_class(1, 2), mpq_class(-3, 4), mpq_class(2, 3)}) {
    BiasedSpectrum bs = biased_fourier(TruthTable::dictator(1, 1), bias_of({mu}));
    REQUIRE(bs.mean() == mu);
    REQUIRE(bs.raw(1) == 1);
    REQUIRE(bs.squared(1) == 1 - mu * mu);
    REQUIRE(bs.parseval_holds());
    REQUIRE(bs.variance() == 1 - mu * mu);
  }
}

TEST_CASE("constant function under any bias") {
  BiasedSpectrum bs =
      biased_fourier(TruthTable::constant(2, 1), bias_of({mpq_class(1, 3), mpq_class(-1, 2)}));
  CHECK(bs.mean() == 1);
  CHECK(bs.squared(0) == 1);
  for (Subset s = 1; s < 4; ++s) REQUIRE(bs.squared(s) == 0);
  CHECK_THROWS_AS(fei_plus_sides(bs), DomainError);
  CHECK_THROWS_AS(bs.conditional_nonempty(), DomainError);
}

TEST_CASE("biased parseval and mean on random instances") {
  SplitMix64 rng(70);
  for (int i = 0; i < 200; ++i) {
    int n = 1 + static_cast<int>(rng.below(7));
    TruthTable f = TruthTable::random(n, rng);
    BiasVector mu;
    for (int v = 0; v < n; ++v) {
      mpq_class q(static_cast<long>(rng.below(13)) - 6, 8);
      q.canonicalize();
      mu.mu.push_back(q);
    }
    BiasedSpectrum bs = biased_fourier(f, mu);
    REQUIRE(bs.parseval_holds());
    REQUIRE(bs.mean() == biased_mean(f, mu));  // independent summation route
    if (bs.variance() != 0) {
      mpq_class esize = 0;
      for (int v = 1; v <= n; ++v) esize += bs.marginal(v);
      REQUIRE(esize == bs.expected_size());
    }
  }
}

TEST_CASE("fei-plus sides on named functions") {
  // dictator: lhs = log(1/1) = 0, rhs = 0, minimal constant 0
  BiasedSpectrum d = biased_fourier(TruthTable::dictator(1, 1), BiasVector::zeros(1));
  FeiPlusSides ds = fei_plus_sides(d);
  CHECK(ds.lhs == 0.0);
  CHECK(ds.rhs == 0.0);
  CHECK(min_fei_plus_constant(d) == 0.0);

  // parity on two variables: lhs = 0, rhs = 1
  BiasedSpectrum p = biased_fourier(TruthTable::parity(2, 0b11), BiasVector::zeros(2));
  FeiPlusSides ps = fei_plus_sides(p);
  CHECK(ps.lhs == 0.0);
  CHECK(ps.rhs == 1.0);
  CHECK(min_fei_plus_constant(p) == 0.0);

  // AND2 at mu = 0: masses 1/4 on {1},{2},{1,2}; lhs = 3*(1/4)*2 = 3/2,
  // rhs = 1/4, minimal constant 6
  BiasedSpectrum a = biased_fourier(TruthTable::and_all(2), BiasVector::zeros(2));
  FeiPlusSides as = fei_plus_sides(a);
  CHECK(as.lhs == Catch::Approx(1.5).epsilon(1e-12));
  CHECK(as.rhs == Catch::Approx(0.25).epsilon(1e-12));
  CHECK(min_fei_plus_constant(a) == Catch::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("goodness of protocols") {
  // dictator under bias: Y is a point mass, the Huffman codeword is empty,
  // and the budget collapses to log(1/sigma^2) + log(sigma^2) = 0
  for (mpq_class mu : {mpq_class(0), mpq_class(1, 2)}) {
    BiasedSpectrum d = biased_fourier(TruthTable::dictator(1, 1), bias_of({mu}));
    CHECK(goodness_budget(d, 0.0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(is_good_protocol(d, 0.0, 0.0));
    CHECK(min_good_constant(d, 0.0) == 0.0);
    // ... but a positive-length protocol for it admits no finite constant
    CHECK(min_good_constant(d, 1.0) == std::numeric_limits<double>::infinity());
  }

  // parity12 at mu = 0 with a one-symbol protocol: E|Y| = 2 and the log
  // terms vanish, so the least good constant is exactly 1
  BiasedSpectrum p = biased_fourier(TruthTable::parity(2, 0b11), BiasVector::zeros(2));
  CHECK(min_good_constant(p, 1.0) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(is_good_protocol(p, 1.0, 1.0));
  CHECK_FALSE(is_good_protocol(p, 1.0, 0.9));
}

TEST_CASE("a good protocol forces the fei-plus inequality") {
  SplitMix64 rng(71);
  for (int i = 0; i < 200; ++i) {
    int n = 1 + static_cast<int>(rng.below(6));
    TruthTable f = TruthTable::random(n, rng);
    if (f.is_constant()) continue;
    BiasVector mu;
    for (int v = 0; v < n; ++v) {
      mpq_class q(static_cast<long>(rng.below(13)) - 6, 8);
      q.canonicalize();
      mu.mu.push_back(q);
    }
    BiasedSpectrum bs = biased_fourier(f, mu);
    Distribution<Subset> cond = bs.conditional_nonempty();
    double len = expected_length(huffman_build(cond, 2), cond).get_d();
    double c_good = min_good_constant(bs, len);
    if (!std::isfinite(c_good)) continue;
    REQUIRE(min_fei_plus_constant(bs) <= c_good + 1e-9);
    REQUIRE(is_good_protocol(bs, len, c_good + 1e-12));
  }
}

TEST_CASE("biased coefficients drift continuously to uniform") {
  SplitMix64 rng(72);
  for (int i = 0; i < 50; ++i) {
    int n = 1 + static_cast<int>(rng.below(6));
    TruthTable f = TruthTable::random(n, rng);
    Spectrum us = fourier_transform(f);
    BiasVector tiny;
    for (int v = 0; v < n; ++v) tiny.mu.push_back(mpq_class(1, 1024));
    BiasedSpectrum bs = biased_fourier(f, tiny);
    for (Subset s = 0; s < bs.size(); ++s)
      REQUIRE(std::abs(bs.coefficient(s) - us.coefficient(s).to_double()) <= 4.0 * n / 1024.0);
  }
}
