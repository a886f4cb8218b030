#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "feikit/distribution.hpp"
#include "feikit/errors.hpp"

namespace feikit {

/// A code over a sigma-ary output alphabet.  Codewords use the digit
/// characters '0'..'9','a'..'z', so sigma <= 36.
template <typename Outcome>
struct Code {
  int alphabet_size = 2;
  std::vector<std::pair<Outcome, std::string>> words;  // sorted by outcome

  const std::string* find(const Outcome& o) const {
    auto it = std::lower_bound(words.begin(), words.end(), o,
                               [](const auto& a, const Outcome& k) { return a.first < k; });
    if (it == words.end() || !(it->first == o)) return nullptr;
    return &it->second;
  }
};

inline char code_digit(int d) {
  return d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + d - 10);
}

/// Optimal sigma-ary prefix-free code for the distribution.
///
/// Determinism: ties in the merge queue are broken by the lexicographically
/// smallest sorted outcome set, and the sigma merged children receive digits
/// in that same order, so the codebook is reproducible bit for bit.  A lone
/// outcome gets the empty codeword.  When (support-1) is not a multiple of
/// (sigma-1), zero-probability placeholders pad the first merge, as usual
/// for sigma-ary Huffman.
template <typename Outcome>
Code<Outcome> huffman_build(const Distribution<Outcome>& dist, int sigma = 2) {
  if (sigma < 2 || sigma > 36) throw DomainError("huffman: alphabet size must be in [2, 36]");
  if (dist.atoms.empty()) throw DomainError("huffman: empty distribution");

  struct Node {
    mpq_class p;
    std::vector<int> key;  // sorted outcome indices under this node; dummies >= L
    int id;
    std::vector<int> children;
  };
  const int L = static_cast<int>(dist.atoms.size());

  std::vector<Node> nodes;
  for (int i = 0; i < L; ++i) nodes.push_back(Node{dist.atoms[static_cast<std::size_t>(i)].second, {i}, i, {}});

  Code<Outcome> code;
  code.alphabet_size = sigma;
  if (L == 1) {
    code.words.emplace_back(dist.atoms[0].first, std::string());
    return code;
  }

  int pad = (sigma - 1 - (L - 1) % (sigma - 1)) % (sigma - 1);
  for (int i = 0; i < pad; ++i) nodes.push_back(Node{mpq_class(0), {L + i}, L + i, {}});

  auto less = [&nodes](int a, int b) {
    int c = cmp(nodes[static_cast<std::size_t>(a)].p, nodes[static_cast<std::size_t>(b)].p);
    if (c != 0) return c < 0;
    return nodes[static_cast<std::size_t>(a)].key < nodes[static_cast<std::size_t>(b)].key;
  };
  std::set<int, decltype(less)> queue(less);
  for (const auto& n : nodes) queue.insert(n.id);

  while (queue.size() > 1) {
    Node parent;
    parent.p = 0;
    for (int d = 0; d < sigma && !queue.empty(); ++d) {
      int child = *queue.begin();
      queue.erase(queue.begin());
      parent.children.push_back(child);
      parent.p += nodes[static_cast<std::size_t>(child)].p;
      const auto& k = nodes[static_cast<std::size_t>(child)].key;
      parent.key.insert(parent.key.end(), k.begin(), k.end());
    }
    std::sort(parent.key.begin(), parent.key.end());
    parent.id = static_cast<int>(nodes.size());
    nodes.push_back(parent);
    queue.insert(parent.id);
  }

  std::vector<std::string> word(nodes.size());
  auto assign = [&](auto&& self, int id, const std::string& prefix) -> void {
    const Node& n = nodes[static_cast<std::size_t>(id)];
    word[static_cast<std::size_t>(id)] = prefix;
    for (std::size_t d = 0; d < n.children.size(); ++d)
      self(self, n.children[d], prefix + code_digit(static_cast<int>(d)));
  };
  assign(assign, *queue.begin(), std::string());

  for (int i = 0; i < L; ++i)
    code.words.emplace_back(dist.atoms[static_cast<std::size_t>(i)].first,
                            word[static_cast<std::size_t>(i)]);
  return code;
}

/// Kraft sum: sum over codewords of sigma^-len, exact.
template <typename Outcome>
mpq_class kraft_sum(const Code<Outcome>& code) {
  mpq_class s = 0;
  for (const auto& [o, w] : code.words) {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(code.alphabet_size), w.size());
    s += mpq_class(mpz_class(1), den);
  }
  return s;
}

template <typename Outcome>
bool kraft_holds(const Code<Outcome>& code) {
  return kraft_sum(code) <= 1;
}

/// Returns a violating pair of outcomes if one codeword is a prefix of
/// another (equal codewords included), or nullopt if the code is prefix-free.
template <typename Outcome>
std::optional<std::pair<Outcome, Outcome>> prefix_violation(const Code<Outcome>& code) {
  std::vector<std::pair<std::string, Outcome>> by_word;
  for (const auto& [o, w] : code.words) by_word.emplace_back(w, o);
  std::sort(by_word.begin(), by_word.end());
  for (std::size_t i = 0; i + 1 < by_word.size(); ++i) {
    const auto& shorter = by_word[i];
    const auto& longer = by_word[i + 1];
    if (longer.first.compare(0, shorter.first.size(), shorter.first) == 0)
      return std::make_pair(shorter.second, longer.second);
  }
  return std::nullopt;
}

template <typename Outcome>
bool is_prefix_free(const Code<Outcome>& code) {
  return !prefix_violation(code).has_value();
}

/// Expected codeword length under the distribution, exact.
template <typename Outcome>
mpq_class expected_length(const Code<Outcome>& code, const Distribution<Outcome>& dist) {
  mpq_class e = 0;
  for (const auto& [o, p] : dist.atoms) {
    const std::string* w = code.find(o);
    if (w == nullptr) throw DomainError("expected_length: outcome missing from code");
    e += p * static_cast<unsigned long>(w->size());
  }
  return e;
}

/// t-fold product of a distribution, as a distribution over t-tuples in
/// lexicographic order.  Errors out if the product support would exceed
/// max_support.
template <typename Outcome>
Distribution<std::vector<Outcome>> power_distribution(const Distribution<Outcome>& dist, int t,
                                                      std::size_t max_support = 1000000) {
  if (t < 1) throw DomainError("power_distribution: t must be >= 1");
  double projected = std::pow(static_cast<double>(dist.atoms.size()), t);
  if (projected > static_cast<double>(max_support))
    throw DomainError("power_distribution: support size " + std::to_string(projected) +
                      " exceeds the cap");
  Distribution<std::vector<Outcome>> out;
  std::vector<std::size_t> odo(static_cast<std::size_t>(t), 0);
  while (true) {
    std::vector<Outcome> tuple;
    mpq_class p = 1;
    for (std::size_t i = 0; i < odo.size(); ++i) {
      tuple.push_back(dist.atoms[odo[i]].first);
      p *= dist.atoms[odo[i]].second;
    }
    out.atoms.emplace_back(std::move(tuple), std::move(p));
    // odometer, last position fastest
    std::size_t i = odo.size();
    while (i > 0) {
      --i;
      if (++odo[i] < dist.atoms.size()) break;
      odo[i] = 0;
      if (i == 0) return out;
    }
  }
}

/// Huffman code over t-tuples of independent draws.  Its per-copy expected
/// length is within 1/t of the entropy of a single draw.
template <typename Outcome>
Code<std::vector<Outcome>> block_code(const Distribution<Outcome>& dist, int t, int sigma = 2,
                                      std::size_t max_support = 1000000) {
  return huffman_build(power_distribution(dist, t, max_support), sigma);
}

template <typename Outcome>
std::string encode_with(const Code<Outcome>& code, const Outcome& o) {
  const std::string* w = code.find(o);
  if (w == nullptr) throw SupportError("encode_with: outcome is not in the codebook");
  return *w;
}

/// Parses one codeword at `pos` (advancing it) and returns its outcome.
/// Works for any prefix-free code; a single-outcome code consumes nothing.
template <typename Outcome>
const Outcome& prefix_parse(const Code<Outcome>& code, std::string_view text, std::size_t& pos) {
  for (const auto& [o, w] : code.words) {
    if (text.compare(pos, w.size(), w) == 0) {
      pos += w.size();
      return o;
    }
  }
  throw ParseError("prefix_parse: no codeword matches the stream");
}

/// CSV export: outcome,codeword.  OutFn renders an outcome as text.
template <typename Outcome, typename OutFn>
void write_code_csv(std::ostream& out, const Code<Outcome>& code, OutFn&& render) {
  out << "outcome,codeword\n";
  for (const auto& [o, w] : code.words) out << render(o) << "," << w << "\n";
}

/// Distribution files carry dyadic masses: outcome,numerator,log2_denominator.
/// Spectral distributions are always dyadic; writing anything else is an
/// error.
inline void write_distribution_csv(std::ostream& out, const Distribution<std::uint32_t>& dist) {
  out << "outcome,numerator,log2_denominator\n";
  for (const auto& [o, p] : dist.atoms) {
    const mpz_class& den = p.get_den();
    if (mpz_popcount(den.get_mpz_t()) != 1)
      throw DomainError("write_distribution_csv: mass " + p.get_str() + " is not dyadic");
    out << o << "," << p.get_num().get_str() << ","
        << mpz_scan1(den.get_mpz_t(), 0) << "\n";
  }
}

inline Distribution<std::uint32_t> read_distribution_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("distribution csv: empty input");
  Distribution<std::uint32_t> dist;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ParseError("distribution csv: expected 'outcome,numerator,log2_denominator'");
    try {
      std::uint32_t outcome = static_cast<std::uint32_t>(std::stoul(line.substr(0, c1)));
      mpz_class num(line.substr(c1 + 1, c2 - c1 - 1));
      unsigned long exp = std::stoul(line.substr(c2 + 1));
      mpq_class p(num, mpz_class(1) << exp);
      p.canonicalize();
      if (p < 0) throw ParseError("distribution csv: negative mass");
      dist.atoms.emplace_back(outcome, std::move(p));
    } catch (const ParseError&) {
      throw;
    } catch (...) {
      throw ParseError("distribution csv: bad row '" + line + "'");
    }
  }
  dist.sort_and_merge();
  if (!dist.is_normalized()) throw ParseError("distribution csv: masses do not sum to 1");
  return dist;
}

}  // namespace feikit
