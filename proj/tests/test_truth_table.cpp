#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "feikit/truth_table.hpp"

using namespace feikit;

TEST_CASE("index convention: bit i of j set means x_{i+1} = -1") {
  TruthTable d = TruthTable::dictator(3, 2);
  for (std::uint32_t j = 0; j < 8; ++j) {
    int x2 = (j >> 1) & 1u ? -1 : +1;
    REQUIRE(d.eval(j) == x2);
  }
}

TEST_CASE("builtin functions") {
  TruthTable parity = TruthTable::parity(3, 0b111);
  CHECK(parity.eval(0) == 1);
  CHECK(parity.eval(0b101) == 1);
  CHECK(parity.eval(0b100) == -1);

  TruthTable a = TruthTable::and_all(2);
  CHECK(a.eval(0b11) == -1);
  CHECK(a.eval(0b01) == 1);
  CHECK(a.eval(0) == 1);

  TruthTable o = TruthTable::or_all(2);
  CHECK(o.eval(0) == 1);
  CHECK(o.eval(0b10) == -1);

  // Majority of three: -1 iff at least two inputs are -1
  TruthTable m = TruthTable::majority3();
  for (std::uint32_t j = 0; j < 8; ++j)
    REQUIRE(m.eval(j) == (popcount(j) >= 2 ? -1 : 1));
}

TEST_CASE("flip variable permutes inputs") {
  SplitMix64 rng(3);
  for (int n : {3, 6, 7, 9}) {
    TruthTable f = TruthTable::random(n, rng);
    for (int v = 1; v <= n; ++v) {
      TruthTable g = f.flip_variable(v);
      for (std::uint32_t j = 0; j < f.num_inputs(); ++j)
        REQUIRE(g.eval(j) == f.eval(j ^ (std::uint32_t{1} << (v - 1))));
    }
  }
  CHECK_THROWS_AS(TruthTable(3).flip_variable(0), DomainError);
  CHECK_THROWS_AS(TruthTable(3).flip_variable(4), DomainError);
}

TEST_CASE("balanced extension") {
  TruthTable f = TruthTable::and_all(3);
  CHECK_FALSE(f.is_balanced());
  TruthTable g = f.balanced_extension();
  CHECK(g.n() == 4);
  CHECK(g.is_balanced());
  for (std::uint32_t j = 0; j < f.num_inputs(); ++j) {
    REQUIRE(g.eval(j) == f.eval(j));
    REQUIRE(g.eval(j | 8u) == -f.eval(j));
  }
}

TEST_CASE("random balanced is balanced and deterministic") {
  SplitMix64 rng(99);
  for (int i = 0; i < 20; ++i) {
    TruthTable f = TruthTable::random_balanced(8, rng);
    REQUIRE(f.is_balanced());
  }
  SplitMix64 r1(5), r2(5);
  CHECK(TruthTable::random(10, r1) == TruthTable::random(10, r2));
}

TEST_CASE("variable count bounds") {
  CHECK_THROWS_AS(TruthTable(0), DomainError);
  CHECK_THROWS_AS(TruthTable(21), DomainError);
  CHECK_NOTHROW(TruthTable(20));
}

TEST_CASE("file format round trip") {
  SplitMix64 rng(17);
  for (int n : {1, 2, 3, 6, 7, 10}) {
    TruthTable f = TruthTable::random(n, rng);
    std::stringstream ss;
    f.write(ss);
    TruthTable g = TruthTable::read(ss);
    REQUIRE(f == g);
  }
}

TEST_CASE("file format golden example") {
  // majority3: minus on indices 3,5,6,7 -> bits 11101000 -> hex "e8"
  std::stringstream ss;
  TruthTable::majority3().write(ss);
  CHECK(ss.str() == "n=3\ne8\n");
}

TEST_CASE("file format errors") {
  auto read = [](const std::string& text) {
    std::stringstream ss(text);
    return TruthTable::read(ss);
  };
  CHECK_THROWS_AS(read(""), ParseError);
  CHECK_THROWS_AS(read("m=3\ne8\n"), ParseError);
  CHECK_THROWS_AS(read("n=3\ne8f\n"), ParseError);   // too many digits
  CHECK_THROWS_AS(read("n=3\ne\n"), ParseError);     // too few digits
  CHECK_THROWS_AS(read("n=3\nzg\n"), ParseError);    // bad hex
  CHECK_THROWS_AS(read("n=1\n4\n"), ParseError);     // bits beyond 2^n
  CHECK_THROWS_AS(read("n=0\n0\n"), DomainError);
  CHECK_THROWS_AS(read("n=25\n00\n"), DomainError);
  CHECK_NOTHROW(read("n=1\n2\n"));
  CHECK(read("n=3\nE8\n") == TruthTable::majority3());  // uppercase accepted
}
