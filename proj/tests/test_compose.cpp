#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "feikit/compose.hpp"
#include "feikit/suites.hpp"

using namespace feikit;

namespace {

Composition dictator_outer() {
  Composition c;
  c.outer = TruthTable::dictator(1, 1);
  c.inner = {TruthTable::majority3()};
  c.blocks = {{1, 2, 3}};
  c.mu = BiasVector::zeros(3);
  return c;
}

Composition readonce_dnf() {  // OR of two AND blocks
  Composition c;
  c.outer = TruthTable::or_all(2);
  c.inner = {TruthTable::and_all(2), TruthTable::and_all(2)};
  c.blocks = {{1, 2}, {3, 4}};
  c.mu = BiasVector::zeros(4);
  return c;
}

}  // namespace

TEST_CASE("composing with a dictator outer is the inner function") {
  TruthTable h = compose_functions(dictator_outer());
  REQUIRE(h == TruthTable::majority3());
}

TEST_CASE("parity of two dictators is the two-variable parity") {
  Composition c;
  c.outer = TruthTable::parity(2, 0b11);
  c.inner = {TruthTable::dictator(1, 1), TruthTable::dictator(1, 1)};
  c.blocks = {{1}, {2}};
  c.mu = BiasVector::zeros(2);
  REQUIRE(compose_functions(c) == TruthTable::parity(2, 0b11));
}

TEST_CASE("read-once DNF truth table matches direct evaluation") {
  TruthTable h = compose_functions(readonce_dnf());
  for (std::uint32_t x = 0; x < 16; ++x) {
    bool and1 = (x & 0b0011) == 0b0011;
    bool and2 = (x & 0b1100) == 0b1100;
    REQUIRE(h.eval(x) == ((and1 || and2) ? -1 : 1));
  }
}

TEST_CASE("composition validation") {
  Composition c = readonce_dnf();
  c.blocks = {{1, 2}, {2, 3}};  // overlap
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = readonce_dnf();
  c.blocks = {{1, 2}, {3}};  // arity mismatch
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = readonce_dnf();
  c.mu = BiasVector::zeros(5);  // not a partition of 1..5
  CHECK_THROWS_AS(c.validate(), DomainError);
  // constant inner functions have |eta| = 1 and are rejected
  c = readonce_dnf();
  c.inner[0] = TruthTable::constant(2, 1);
  CHECK_THROWS_AS(CompositionAnalysis{c}, DomainError);
}

TEST_CASE("coefficient product identity") {
  CHECK(product_coefficient_identity_holds(CompositionAnalysis(dictator_outer())));
  CHECK(product_coefficient_identity_holds(CompositionAnalysis(readonce_dnf())));
  SplitMix64 rng(80);
  for (int i = 0; i < 60; ++i) {
    CompositionAnalysis an(random_composition(rng));
    REQUIRE(product_coefficient_identity_holds(an));
    REQUIRE(marginal_distribution_claims_hold(an));
  }
}

TEST_CASE("distribution claims on pinned compositions") {
  // dictator outer: the selector is always {1} and the conditional law of
  // the block sample is the inner conditional law
  CompositionAnalysis an(dictator_outer());
  REQUIRE(marginal_distribution_claims_hold(an));
  Distribution<Subset> inner_cond = an.inner[0].conditional_nonempty();
  Distribution<Subset> composed_cond = an.composed.conditional_nonempty();
  REQUIRE(inner_cond.atoms == composed_cond.atoms);  // blocks = identity here

  // parity outer with mean-zero inners: eta = 0 forces Pr[S = {1,2}] = 1
  Composition c;
  c.outer = TruthTable::parity(2, 0b11);
  c.inner = {TruthTable::parity(2, 0b11), TruthTable::dictator(1, 1)};
  c.blocks = {{1, 2}, {3}};
  c.mu = BiasVector::zeros(3);
  CompositionAnalysis pan(c);
  REQUIRE(marginal_distribution_claims_hold(pan));
  for (const auto& [y, p] : pan.composed.conditional_nonempty().atoms)
    REQUIRE(pan.comp.selector(y) == Subset{0b11});
}

TEST_CASE("composed codec") {
  // dictator outer: the selector codeword is empty, so the composed
  // transcript is exactly the block codeword
  CompositionAnalysis an(dictator_outer());
  ComposedCodes codes = build_huffman_codes(an);
  CHECK(encode_with(codes.selector_code, Subset{1}).empty());
  for (const auto& [y, p] : an.composed.conditional_nonempty().atoms) {
    std::string text = composed_encode(an, codes, y);
    REQUIRE(text == encode_with(codes.block_codes[0], y));
    REQUIRE(composed_decode(an, codes, text) == y);
  }
  CHECK_THROWS_AS(composed_encode(an, codes, 0), DomainError);
  CHECK_THROWS_AS(composed_decode(an, codes, "0101010101"), ParseError);

  SplitMix64 rng(81);
  for (int i = 0; i < 40; ++i) {
    CompositionAnalysis ran(random_composition(rng));
    ComposedCodes rc = build_huffman_codes(ran);
    for (const auto& [y, p] : ran.composed.conditional_nonempty().atoms)
      REQUIRE(composed_decode(ran, rc, composed_encode(ran, rc, y)) == y);
    ComposedLength len = composed_expected_length(ran, rc);
    REQUIRE(len.equal);
  }
}

TEST_CASE("composition goodness at the combined constant") {
  CompositionGoodnessReport d = composition_goodness_report(CompositionAnalysis(dictator_outer()));
  CHECK(d.all_hold());
  CompositionGoodnessReport r = composition_goodness_report(CompositionAnalysis(readonce_dnf()));
  CHECK(r.all_hold());

  SplitMix64 rng(82);
  for (int i = 0; i < 40; ++i) {
    CompositionAnalysis an(random_composition(rng));
    REQUIRE(composition_goodness_report(an).all_hold());
  }
}

TEST_CASE("finite block protocol on pinned instances") {
  // measured in development and pinned: these two compositions stay within
  // 1/t per copy; the provable budget for k blocks is (k+1)/t
  for (int t : {1, 2, 4}) {
    BlockProtocolReport d = block_protocol_report(CompositionAnalysis(dictator_outer()), t);
    REQUIRE(d.excess <= 1.0 / t + 1e-9);
    BlockProtocolReport r = block_protocol_report(CompositionAnalysis(readonce_dnf()), t);
    REQUIRE(r.excess <= 1.0 / t + 1e-9);
    REQUIRE(r.within_budget);
  }
  // per-copy excess shrinks as t grows on the DNF instance
  double e1 = block_protocol_report(CompositionAnalysis(readonce_dnf()), 1).excess;
  double e4 = block_protocol_report(CompositionAnalysis(readonce_dnf()), 4).excess;
  CHECK(e4 < e1);
}

TEST_CASE("manifest round trip") {
  Composition c = readonce_dnf();
  c.mu.mu = {mpq_class(1, 2), mpq_class(0), mpq_class(-1, 3), mpq_class(3, 4)};
  std::stringstream ss;
  write_composition_manifest(ss, c);
  Composition back = read_composition_manifest(ss);
  CHECK(back.outer == c.outer);
  CHECK(back.inner == c.inner);
  CHECK(back.blocks == c.blocks);
  CHECK(back.mu.mu == c.mu.mu);

  std::stringstream bad("{ not json");
  CHECK_THROWS_AS(read_composition_manifest(bad), ParseError);
}
