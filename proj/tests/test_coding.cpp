#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "feikit/coding.hpp"
#include "feikit/harness.hpp"
#include "feikit/spectrum.hpp"

using namespace feikit;

namespace {

Distribution<int> make_dist(std::vector<std::pair<int, mpq_class>> atoms) {
  Distribution<int> d;
  d.atoms = std::move(atoms);
  d.sort_and_merge();
  return d;
}

/// Random dyadic distribution on 1..count outcomes.
Distribution<int> random_dist(SplitMix64& rng, int max_outcomes = 12, int scale_bits = 8) {
  int count = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_outcomes)));
  std::uint64_t total = std::uint64_t{1} << scale_bits;
  Distribution<int> d;
  for (int i = 0; i < count; ++i) {
    std::uint64_t w = (i + 1 == count) ? total : rng.below(total + 1);
    if (i + 1 < count) total -= w;
    if (w > 0) {
      mpq_class p(mpz_class(static_cast<unsigned long>(w)), mpz_class(1) << scale_bits);
      p.canonicalize();
      d.atoms.emplace_back(i, p);
    }
  }
  d.sort_and_merge();
  return d;
}

/// Any prefix-free code on the same support, for optimality comparisons:
/// grow a random sigma-ary code tree until it has enough leaves.
Code<int> random_prefix_code(const Distribution<int>& dist, int sigma, SplitMix64& rng) {
  std::vector<std::string> leaves = {""};
  while (leaves.size() < dist.atoms.size()) {
    std::size_t pick = rng.below(leaves.size());
    std::string base = leaves[pick];
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pick));
    for (int d = 0; d < sigma; ++d) leaves.push_back(base + code_digit(d));
  }
  Code<int> code;
  code.alphabet_size = sigma;
  for (std::size_t i = 0; i < dist.atoms.size(); ++i)
    code.words.emplace_back(dist.atoms[i].first, leaves[i]);
  return code;
}

}  // namespace

TEST_CASE("degenerate and uniform codes") {
  Distribution<int> point = make_dist({{7, mpq_class(1)}});
  Code<int> c = huffman_build(point, 2);
  REQUIRE(c.words.size() == 1);
  CHECK(c.words[0].second.empty());  // single outcome -> empty codeword
  CHECK(expected_length(c, point) == 0);
  CHECK(is_prefix_free(c));
  CHECK(kraft_holds(c));

  Distribution<int> uniform4 =
      make_dist({{0, mpq_class(1, 4)}, {1, mpq_class(1, 4)}, {2, mpq_class(1, 4)}, {3, mpq_class(1, 4)}});
  Code<int> u = huffman_build(uniform4, 2);
  for (const auto& [o, w] : u.words) REQUIRE(w.size() == 2);
  CHECK(expected_length(u, uniform4) == 2);
  CHECK(kraft_sum(u) == 1);
}

TEST_CASE("majority3 spectral distribution codes at the entropy") {
  Spectrum m = fourier_transform(TruthTable::majority3());
  Distribution<Subset> d;
  for (Subset s : m.support()) d.atoms.emplace_back(s, m.squared_mass(s).to_mpq());
  Code<Subset> c = huffman_build(d, 2);
  CHECK(expected_length(c, d) == 2);  // = H exactly, four atoms of 1/4
  CHECK(is_prefix_free(c));
}

TEST_CASE("kraft and prefix checks with explicit codes") {
  Code<std::string> good;
  good.alphabet_size = 2;
  good.words = {{"a", "0"}, {"b", "10"}, {"c", "11"}};
  CHECK(is_prefix_free(good));
  CHECK(kraft_sum(good) == 1);

  Code<std::string> bad;
  bad.alphabet_size = 2;
  bad.words = {{"a", "0"}, {"b", "01"}};
  auto violation = prefix_violation(bad);
  REQUIRE(violation.has_value());
  CHECK(violation->first == "a");
  CHECK(violation->second == "b");
  CHECK_FALSE(is_prefix_free(bad));
}

TEST_CASE("huffman properties on random distributions") {
  SplitMix64 rng(60);
  for (int sigma : {2, 3}) {
    for (int i = 0; i < 150; ++i) {
      Distribution<int> dist = random_dist(rng);
      Code<int> code = huffman_build(dist, sigma);
      REQUIRE(is_prefix_free(code));
      REQUIRE(kraft_holds(code));
      double h = dist.entropy_bits() / std::log2(static_cast<double>(sigma));
      double len = expected_length(code, dist).get_d();
      REQUIRE(len >= h - 1e-9);
      REQUIRE(len <= h + 1.0 + 1e-9);
      // optimal against arbitrary prefix-free codes on the same support
      mpq_class huff_len = expected_length(code, dist);
      for (int r = 0; r < 100; ++r) {
        Code<int> other = random_prefix_code(dist, sigma, rng);
        REQUIRE(is_prefix_free(other));
        REQUIRE(huff_len <= expected_length(other, dist));
      }
    }
  }
}

TEST_CASE("huffman determinism") {
  SplitMix64 rng(61);
  Distribution<int> dist = random_dist(rng);
  Code<int> a = huffman_build(dist, 3);
  Code<int> b = huffman_build(dist, 3);
  REQUIRE(a.words == b.words);
}

TEST_CASE("huffman rejects an empty distribution") {
  Distribution<int> empty;
  CHECK_THROWS_AS(huffman_build(empty, 2), DomainError);
  CHECK_THROWS_AS(huffman_build(make_dist({{0, mpq_class(1)}}), 1), DomainError);
}

TEST_CASE("block codes") {
  // point mass: zero length at every t
  Distribution<int> point = make_dist({{3, mpq_class(1)}});
  for (int t : {1, 2, 5}) {
    auto code = block_code(point, t);
    auto prod = power_distribution(point, t);
    REQUIRE(expected_length(code, prod) == 0);
  }

  // fair coin: already optimal at t = 1; per-copy excess <= 1/t always
  Distribution<int> coin = make_dist({{0, mpq_class(1, 2)}, {1, mpq_class(1, 2)}});
  for (int t : {1, 2, 4}) {
    auto prod = power_distribution(coin, t);
    mpq_class len = expected_length(block_code(coin, t), prod);
    REQUIRE(len == t);  // uniform on 2^t outcomes
  }

  // majority3 conditional law: four atoms of 1/4, so every block code hits
  // the entropy exactly and the per-copy excess is 0, non-increasing in t
  Distribution<Subset> cond = conditional_nonempty(fourier_transform(TruthTable::majority3()));
  double h = cond.entropy_bits();
  double prev_excess = 1e9;
  for (int t : {1, 2, 3}) {
    auto prod = power_distribution(cond, t);
    double per_copy = mpq_class(expected_length(block_code(cond, t), prod) / t).get_d();
    double excess = per_copy - h;
    REQUIRE(excess <= 1.0 / t + 1e-9);
    REQUIRE(excess <= prev_excess + 1e-12);
    prev_excess = excess;
  }

  // random distributions: per-copy excess <= 1/t
  SplitMix64 rng(62);
  for (int i = 0; i < 25; ++i) {
    Distribution<int> dist = random_dist(rng, 6);
    double hd = dist.entropy_bits();
    for (int t : {1, 2, 3, 4}) {
      auto prod = power_distribution(dist, t);
      double per_copy = mpq_class(expected_length(block_code(dist, t), prod) / t).get_d();
      REQUIRE(per_copy - hd <= 1.0 / t + 1e-9);
    }
  }

  // support blow-up is rejected
  Distribution<int> wide = random_dist(rng, 12, 10);
  while (wide.atoms.size() < 12) wide = random_dist(rng, 12, 10);
  CHECK_THROWS_AS(power_distribution(wide, 6, 1000000), DomainError);
}

TEST_CASE("prefix parse inverts encode_with") {
  SplitMix64 rng(63);
  Distribution<int> dist = random_dist(rng, 9);
  Code<int> code = huffman_build(dist, 2);
  std::string stream;
  std::vector<int> sent;
  for (int i = 0; i < 50; ++i) {
    const auto& [o, p] = dist.atoms[rng.below(dist.atoms.size())];
    sent.push_back(o);
    stream += encode_with(code, o);
  }
  std::size_t pos = 0;
  for (int o : sent) REQUIRE(prefix_parse(code, stream, pos) == o);
  REQUIRE(pos == stream.size());
  CHECK_THROWS_AS(encode_with(code, 1000), SupportError);
}

TEST_CASE("code csv export") {
  Distribution<int> d = make_dist({{0, mpq_class(1, 2)}, {1, mpq_class(1, 2)}});
  Code<int> c = huffman_build(d, 2);
  std::ostringstream ss;
  write_code_csv(ss, c, [](int o) { return std::to_string(o); });
  CHECK(ss.str() == "outcome,codeword\n0,0\n1,1\n");
}

TEST_CASE("distribution csv round trip") {
  // the spectral distribution of majority3 is dyadic
  Spectrum m = fourier_transform(TruthTable::majority3());
  Distribution<std::uint32_t> d;
  for (Subset s : m.support()) d.atoms.emplace_back(s, m.squared_mass(s).to_mpq());
  std::stringstream ss;
  write_distribution_csv(ss, d);
  CHECK(ss.str() ==
        "outcome,numerator,log2_denominator\n"
        "1,1,2\n2,1,2\n4,1,2\n7,1,2\n");
  Distribution<std::uint32_t> back = read_distribution_csv(ss);
  CHECK(back.atoms == d.atoms);

  // non-dyadic masses cannot be written in this format
  Distribution<std::uint32_t> thirds;
  thirds.atoms = {{0u, mpq_class(1, 3)}, {1u, mpq_class(2, 3)}};
  std::ostringstream sink;
  CHECK_THROWS_AS(write_distribution_csv(sink, thirds), DomainError);

  auto read = [](const std::string& text) {
    std::stringstream in(text);
    return read_distribution_csv(in);
  };
  CHECK_THROWS_AS(read(""), ParseError);
  CHECK_THROWS_AS(read("outcome,numerator,log2_denominator\n1,1\n"), ParseError);
  CHECK_THROWS_AS(read("outcome,numerator,log2_denominator\n1,1,1\n"), ParseError);  // sums to 1/2
  CHECK_THROWS_AS(read("outcome,numerator,log2_denominator\n1,-1,0\n2,1,0\n3,1,0\n"), ParseError);
}
