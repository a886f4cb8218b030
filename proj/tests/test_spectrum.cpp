#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

#include "feikit/boolfn.hpp"
#include "feikit/harness.hpp"
#include "feikit/spectrum.hpp"

using namespace feikit;

TEST_CASE("constant and parity spectra") {
  Spectrum c = fourier_transform(TruthTable::constant(4, +1));
  CHECK(c.scaled(0) == 16);
  for (Subset s = 1; s < 16; ++s) REQUIRE(c.scaled(s) == 0);

  Spectrum p = fourier_transform(TruthTable::parity(4, 0b1111));
  CHECK(p.scaled(0b1111) == 16);
  for (Subset s = 0; s < 16; ++s)
    if (s != 0b1111) REQUIRE(p.scaled(s) == 0);
}

TEST_CASE("majority3 spectrum") {
  // direct E[f chi_S] summation over all 8 inputs gives
  // fhat({1}) = fhat({2}) = fhat({3}) = 1/2 and fhat({1,2,3}) = -1/2
  Spectrum m = fourier_transform(TruthTable::majority3());
  std::map<Subset, std::int64_t> expected = {{0b001, 4}, {0b010, 4}, {0b100, 4}, {0b111, -4}};
  for (Subset s = 0; s < 8; ++s)
    REQUIRE(m.scaled(s) == (expected.count(s) ? expected[s] : 0));
  CHECK(m.coefficient(1) == Dyadic(mpz_class(1), 1));
  CHECK(m.squared_mass(7) == Dyadic(mpz_class(1), 2));
}

TEST_CASE("fwht equals naive transform exhaustively for n <= 3") {
  for (int n = 1; n <= 3; ++n) {
    std::uint64_t count = std::uint64_t{1} << (std::uint64_t{1} << n);
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      TruthTable f(n);
      for (std::uint32_t j = 0; j < f.num_inputs(); ++j)
        if ((bits >> j) & 1u) f.set(j, -1);
      Spectrum fast = fourier_transform(f);
      REQUIRE(fast.scaled_all() == oracles::naive_fourier(f).scaled_all());
      REQUIRE(fast.parseval_holds());
    }
  }
}

TEST_CASE("fwht equals naive on random functions n = 5, 6") {
  SplitMix64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    TruthTable f = TruthTable::random(5 + (i & 1), rng);
    Spectrum fast = fourier_transform(f);
    REQUIRE(fast.scaled_all() == oracles::naive_fourier(f).scaled_all());
    REQUIRE(fast.parseval_holds());
    REQUIRE(fast.inverse_truth_table() == f);
  }
}

TEST_CASE("spectral entropy values") {
  CHECK(fourier_transform(TruthTable::dictator(4, 3)).spectral_entropy() == 0.0);
  CHECK(fourier_transform(TruthTable::constant(4, -1)).spectral_entropy() == 0.0);
  // four atoms of mass 1/4
  CHECK(fourier_transform(TruthTable::majority3()).spectral_entropy() == 2.0);
}

TEST_CASE("non-normalized spectra are rejected") {
  Spectrum bogus(2, {1, 2, 3, 4});
  CHECK_FALSE(bogus.parseval_holds());
  CHECK_THROWS_AS(bogus.spectral_entropy(), DomainError);
  CHECK_THROWS_AS(bogus.inverse_truth_table(), DomainError);
  CHECK_THROWS_AS((SpectralSampler{bogus}), DomainError);
}

TEST_CASE("spectrum construction invariants") {
  CHECK_THROWS_AS(Spectrum(0), DomainError);
  CHECK_THROWS_AS(Spectrum(21), DomainError);
  CHECK_THROWS_AS(Spectrum(2, {1, 2, 3}), DomainError);        // wrong size
  CHECK_THROWS_AS(Spectrum(2, {5, 0, 0, 0}), DomainError);     // |w| beyond 2^n
  CHECK_THROWS_AS(Spectrum(2, {-5, 0, 0, 0}), DomainError);
  CHECK_NOTHROW(Spectrum(2, {4, 0, 0, 0}));
}

TEST_CASE("spectral sampling: point supports are deterministic") {
  SplitMix64 rng(5);
  SpectralSampler dict(fourier_transform(TruthTable::dictator(5, 4)));
  SpectralSampler par(fourier_transform(TruthTable::parity(6, 0b111111)));
  for (int i = 0; i < 200; ++i) {
    REQUIRE(dict.sample(rng) == Subset{1 << 3});
    REQUIRE(par.sample(rng) == Subset{0b111111});
  }
}

TEST_CASE("spectral sampling frequencies match the masses") {
  // majority3: four atoms of 1/4; 10^5 draws within 4 sigma
  SpectralSampler sampler(fourier_transform(TruthTable::majority3()));
  SplitMix64 rng(123);
  const int samples = 100000;
  std::array<int, 8> freq{};
  for (int i = 0; i < samples; ++i) ++freq[sampler.sample(rng)];
  double sigma = std::sqrt(0.25 * 0.75 / samples);
  for (Subset s : {Subset{1}, Subset{2}, Subset{4}, Subset{7}})
    REQUIRE(std::abs(freq[s] / double(samples) - 0.25) <= 4 * sigma);
  CHECK(freq[0] + freq[3] + freq[5] + freq[6] == 0);
}

TEST_CASE("conditional nonempty distribution") {
  // mean-zero f: identical to the squared spectrum on nonempty sets
  Spectrum m = fourier_transform(TruthTable::majority3());
  Distribution<Subset> cond = conditional_nonempty(m);
  REQUIRE(cond.is_normalized());
  for (const auto& [s, p] : cond.atoms) REQUIRE(p == m.squared_mass(s).to_mpq());

  // AND2: three equal atoms of 1/3 over {1}, {2}, {1,2}
  Distribution<Subset> a = conditional_nonempty(fourier_transform(TruthTable::and_all(2)));
  REQUIRE(a.atoms.size() == 3);
  for (const auto& [s, p] : a.atoms) REQUIRE(p == mpq_class(1, 3));

  CHECK_THROWS_AS(conditional_nonempty(fourier_transform(TruthTable::constant(3, 1))),
                  DomainError);
}

TEST_CASE("spectrum csv export") {
  std::ostringstream ss;
  fourier_transform(TruthTable::majority3()).write_csv(ss);
  CHECK(ss.str() ==
        "mask,numerator,log2_denominator\n"
        "1,1,1\n"
        "2,1,1\n"
        "4,1,1\n"
        "7,-1,1\n");
}
