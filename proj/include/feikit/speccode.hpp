#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "feikit/dtree.hpp"
#include "feikit/errors.hpp"
#include "feikit/prng.hpp"

namespace feikit {

/// Protocol alphabet: {0, 1, bot}.  Text form uses '0', '1', '#'.
enum class Symbol : unsigned char { kZero = 0, kOne = 1, kBot = 2 };

/// Output of the spectral-sample protocol on a tree T and set S:
///   - empty iff S = {};
///   - otherwise membership and direction symbols interleaved
///     (membership first), with the final direction slot replaced by bot;
///   - so the length is 2 * (nodes visited), and bot appears exactly once,
///     at the end.
struct Transcript {
  std::vector<Symbol> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }

  std::string text() const {
    std::string s;
    s.reserve(symbols.size());
    for (Symbol y : symbols) s += (y == Symbol::kBot ? '#' : (y == Symbol::kOne ? '1' : '0'));
    return s;
  }

  static Transcript from_text(std::string_view s) {
    Transcript t;
    t.symbols.reserve(s.size());
    for (char c : s) {
      if (c == '0')
        t.symbols.push_back(Symbol::kZero);
      else if (c == '1')
        t.symbols.push_back(Symbol::kOne);
      else if (c == '#')
        t.symbols.push_back(Symbol::kBot);
      else
        throw TranscriptError(std::string("transcript: bad character '") + c + "'");
    }
    return t;
  }

  /// Binary form: 2 bits per symbol (00, 01, 10 = zero, one, bot), four
  /// symbols per byte from the most significant bit pair down; a trailing
  /// partial byte is padded with the reserved pattern 11.
  std::vector<std::uint8_t> to_binary() const {
    std::vector<std::uint8_t> out((symbols.size() + 3) / 4, 0xffu);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      int shift = 6 - 2 * static_cast<int>(i % 4);
      std::uint8_t& b = out[i / 4];
      b = static_cast<std::uint8_t>((b & ~(0x3u << shift)) |
                                    (static_cast<unsigned>(symbols[i]) << shift));
    }
    return out;
  }

  static Transcript from_binary(const std::vector<std::uint8_t>& bytes) {
    Transcript t;
    for (std::size_t i = 0; i < 4 * bytes.size(); ++i) {
      int shift = 6 - 2 * static_cast<int>(i % 4);
      unsigned v = (bytes[i / 4] >> shift) & 0x3u;
      if (v == 3) {
        // padding; the rest of the final byte must be padding too
        for (std::size_t j = i; j < 4 * bytes.size(); ++j) {
          int sh = 6 - 2 * static_cast<int>(j % 4);
          if (((bytes[j / 4] >> sh) & 0x3u) != 3)
            throw TranscriptError("transcript binary: data after padding");
        }
        return t;
      }
      t.symbols.push_back(static_cast<Symbol>(v));
    }
    return t;
  }

  bool operator==(const Transcript& o) const { return symbols == o.symbols; }
};

namespace detail {

/// Shared encoder: coef(id, S) must return the scaled coefficient
/// f^_id(S) * 2^n of the subtree rooted at id.
template <typename CoefFn>
Transcript encode_impl(const DecisionTree& t, Subset s, SplitMix64& rng, CoefFn&& coef) {
  if (s >= (Subset{1} << t.n())) throw DomainError("encode: set mentions variables beyond n");
  Transcript out;
  if (s == 0) return out;  // the empty set always encodes to the empty transcript
  if (coef(t.root(), s) == 0)
    throw SupportError("encode: the set has zero Fourier weight; the protocol is defined only "
                       "on the spectral support");
  int id = t.root();
  Subset cur = s;
  while (true) {
    const auto& nd = t.node(id);
    // A subtree whose spectrum charges a nonempty set cannot be constant.
    out.symbols.push_back(subset_contains(cur, nd.var) ? Symbol::kOne : Symbol::kZero);
    cur = subset_without(cur, nd.var);
    if (cur == 0) {
      out.symbols.push_back(Symbol::kBot);
      return out;
    }
    std::int64_t wl = coef(nd.left, cur);
    std::int64_t wr = coef(nd.right, cur);
    // Branch with probability proportional to the squared subtree
    // coefficients; a zero-weight branch is selected with probability 0.
    std::uint64_t a = static_cast<std::uint64_t>(wl * wl);
    std::uint64_t b = static_cast<std::uint64_t>(wr * wr);
    std::uint64_t r = rng.below(a + b);
    if (r < a) {
      out.symbols.push_back(Symbol::kZero);
      id = nd.left;
    } else {
      out.symbols.push_back(Symbol::kOne);
      id = nd.right;
    }
  }
}

}  // namespace detail

inline Transcript encode(const DecisionTree& t, Subset s, SplitMix64& rng) {
  return detail::encode_impl(t, s, rng, [&](int id, Subset q) {
    return subtree_scaled_coefficient(t, id, q);
  });
}

/// Table-backed variant for hot loops.
inline Transcript encode(const SubtreeSpectra& sp, Subset s, SplitMix64& rng) {
  return detail::encode_impl(sp.tree(), s, rng,
                             [&](int id, Subset q) { return sp.scaled(id, q); });
}

/// Inverse of encode: walk the tree, reading a membership symbol for the
/// current node's variable and then either the terminator or a direction.
/// `visited` records the queried variables in path order, so a transcript
/// always has exactly 2 * visited.size() symbols.
struct DecodedWalk {
  Subset set = 0;
  std::vector<int> visited;
};

inline DecodedWalk decode_walk(const DecisionTree& t, const Transcript& tr) {
  DecodedWalk out;
  if (tr.empty()) return out;
  int id = t.root();
  std::size_t pos = 0;
  while (true) {
    if (t.node(id).is_leaf()) throw TranscriptError("decode: descended past a leaf");
    if (pos >= tr.size()) throw TranscriptError("decode: truncated transcript");
    Symbol m = tr.symbols[pos++];
    if (m == Symbol::kBot) throw TranscriptError("decode: terminator in a membership slot");
    out.visited.push_back(t.node(id).var);
    if (m == Symbol::kOne) out.set = subset_with(out.set, t.node(id).var);
    if (pos >= tr.size()) throw TranscriptError("decode: truncated transcript");
    Symbol d = tr.symbols[pos++];
    if (d == Symbol::kBot) {
      if (pos != tr.size()) throw TranscriptError("decode: symbols after the terminator");
      return out;
    }
    id = (d == Symbol::kZero) ? t.node(id).left : t.node(id).right;
  }
}

inline Subset decode(const DecisionTree& t, const Transcript& tr) {
  return decode_walk(t, tr).set;
}

/// p_i(T) = probability that the protocol's path contains variable i when
/// the input set is drawn from the spectral distribution.  Exact dynamic
/// program:
///   p_i(T) = Var[f_T]                     if the root queries i,
///   p_i(T) = (p_i(T0) + p_i(T1)) / 2      if i occurs below the root,
///   p_i(T) = 0                            if i does not occur in T.
struct PathProbabilities {
  std::map<int, Dyadic> p;  // variables absent from the map have p_i = 0
  Dyadic expected_path_length;
  Dyadic expected_transcript_length;  // = 2 * expected_path_length

  Dyadic probability(int var) const {
    auto it = p.find(var);
    return it == p.end() ? Dyadic() : it->second;
  }
};

inline PathProbabilities path_probabilities(const DecisionTree& t) {
  std::vector<TruthTable> tables = node_truth_tables(t);
  auto rec = [&](auto&& self, int id) -> std::map<int, Dyadic> {
    const auto& nd = t.node(id);
    if (nd.is_leaf()) return {};
    std::map<int, Dyadic> m;
    for (auto& [i, v] : self(self, nd.left)) m[i] += v.halved();
    for (auto& [i, v] : self(self, nd.right)) m[i] += v.halved();
    // The root variable of this subtree occurs nowhere below it.
    m[nd.var] = variance(tables[static_cast<std::size_t>(id)]);
    return m;
  };
  PathProbabilities out;
  out.p = rec(rec, t.root());
  for (const auto& [i, v] : out.p) out.expected_path_length += v;
  out.expected_transcript_length = Dyadic(2) * out.expected_path_length;
  return out;
}

/// Per-variable bound p_i(T) <= 2*Inf_i[f] + Cov_i[T], exact.
struct PathBound {
  int var = 0;
  Dyadic probability;
  Dyadic influence;
  Dyadic covariance;
  Dyadic slack;  // 2*Inf_i + Cov_i - p_i
  bool holds = false;
};

struct PathBoundsReport {
  std::vector<PathBound> per_variable;
  bool all_hold = true;
};

inline PathBoundsReport path_probability_bounds(const DecisionTree& t) {
  TruthTable f = to_truth_table(t);
  PathProbabilities probs = path_probabilities(t);
  CovReport cov = tree_covariance(t);
  PathBoundsReport rep;
  for (int i = 1; i <= t.n(); ++i) {
    PathBound b;
    b.var = i;
    b.probability = probs.probability(i);
    b.influence = influence(f, i);
    auto it = cov.per_variable.find(i);
    b.covariance = it == cov.per_variable.end() ? Dyadic() : it->second;
    b.slack = Dyadic(2) * b.influence + b.covariance - b.probability;
    b.holds = b.slack.sign() >= 0;
    rep.all_hold = rep.all_hold && b.holds;
    rep.per_variable.push_back(std::move(b));
  }
  return rep;
}

/// Expected transcript length against its three structural budgets:
///   E|P(X)| <= 4*Inf[f] + 2*Cov[T], <= (2k+2)*Inf[f], <= 4*Inf[f] + 2d.
/// All quantities exact; the first budget is asserted as <= and achieved
/// strictness is recorded separately.
struct ProtocolLengthReport {
  Dyadic expected_length;
  Dyadic influence_cov_budget;
  Dyadic read_budget;
  Dyadic depth_budget;
  int max_read = 0;
  bool within_influence_cov = false;
  bool within_read = false;
  bool within_depth = false;
  bool strictly_below_influence_cov = false;
  bool all_hold() const { return within_influence_cov && within_read && within_depth; }
};

inline ProtocolLengthReport protocol_length_report(const DecisionTree& t) {
  ProtocolLengthReport rep;
  TruthTable f = to_truth_table(t);
  Dyadic inf = total_influence(f);
  Dyadic cov = tree_covariance(t).total;
  Dyadic d = t.expected_depth();
  rep.max_read = t.max_read();
  rep.expected_length = path_probabilities(t).expected_transcript_length;
  rep.influence_cov_budget = Dyadic(4) * inf + Dyadic(2) * cov;
  rep.read_budget = Dyadic(2 * rep.max_read + 2) * inf;
  rep.depth_budget = Dyadic(4) * inf + Dyadic(2) * d;
  rep.within_influence_cov = rep.expected_length <= rep.influence_cov_budget;
  rep.within_read = rep.expected_length <= rep.read_budget;
  rep.within_depth = rep.expected_length <= rep.depth_budget;
  rep.strictly_below_influence_cov = rep.expected_length < rep.influence_cov_budget;
  return rep;
}

/// The full entropy chain, from the protocol outward (logs in double,
/// everything else exact underneath):
///   H[f^2] <= log2(3)*E|P(X)| + 2*Inf[f]
///          <= (2 + (2k+2)*log2 3)*Inf[f]  <= 9k*Inf[f]
///   and, when Inf[f] >= 1,  H[f^2] <= 12d*Inf[f].
struct EntropyBudgetReport {
  double entropy = 0;
  double expected_length = 0;
  double influence = 0;
  double apf_chain_bound = 0;     // log2(3)*E + 2*Inf
  double general_read_bound = 0;  // (2+(2k+2)*log2 3)*Inf
  double nine_k_bound = 0;
  double twelve_d_bound = 0;
  int max_read = 0;
  bool influence_at_least_one = false;
  bool constant_function = false;
  bool chain_holds = false;
};

inline EntropyBudgetReport entropy_budget_report(const DecisionTree& t, double tol = 1e-9) {
  EntropyBudgetReport rep;
  TruthTable f = to_truth_table(t);
  Spectrum spec = fourier_transform(f);
  Dyadic inf = total_influence(f);
  rep.entropy = spec.spectral_entropy();
  rep.expected_length = path_probabilities(t).expected_transcript_length.to_double();
  rep.influence = inf.to_double();
  rep.max_read = std::max(1, t.max_read());
  rep.constant_function = f.is_constant();
  rep.influence_at_least_one = inf >= Dyadic(1);
  double log3 = std::log2(3.0);
  rep.apf_chain_bound = log3 * rep.expected_length + 2.0 * rep.influence;
  rep.general_read_bound = (2.0 + (2.0 * rep.max_read + 2.0) * log3) * rep.influence;
  rep.nine_k_bound = 9.0 * rep.max_read * rep.influence;
  rep.twelve_d_bound = 12.0 * t.expected_depth().to_double() * rep.influence;
  rep.chain_holds = rep.entropy <= rep.apf_chain_bound + tol &&
                    rep.entropy <= rep.general_read_bound + tol &&
                    rep.entropy <= rep.nine_k_bound + tol &&
                    (!rep.influence_at_least_one || rep.entropy <= rep.twelve_d_bound + tol);
  return rep;
}

/// Exhaustive expansion of the protocol's output distribution: every
/// transcript reachable with nonzero probability, with its exact
/// probability over both the spectral sample and the branch randomness.
struct TranscriptAtom {
  std::string text;
  mpq_class probability;
};

inline std::vector<TranscriptAtom> enumerate_transcripts(const DecisionTree& t,
                                                         std::size_t max_atoms = 1u << 20) {
  std::map<std::string, mpq_class> atoms;
  auto rec = [&](auto&& self, int id, Subset cur, mpq_class prob, std::string prefix) -> void {
    const auto& nd = t.node(id);
    prefix += subset_contains(cur, nd.var) ? '1' : '0';
    cur = subset_without(cur, nd.var);
    if (cur == 0) {
      atoms[prefix + '#'] += prob;
      return;
    }
    std::int64_t wl = subtree_scaled_coefficient(t, nd.left, cur);
    std::int64_t wr = subtree_scaled_coefficient(t, nd.right, cur);
    mpq_class total(static_cast<long>(wl) * wl + static_cast<long>(wr) * wr);
    if (wl != 0)
      self(self, nd.left, cur, prob * mpq_class(static_cast<long>(wl) * wl) / total,
           prefix + '0');
    if (wr != 0)
      self(self, nd.right, cur, prob * mpq_class(static_cast<long>(wr) * wr) / total,
           prefix + '1');
    if (atoms.size() > max_atoms) throw DomainError("enumerate_transcripts: atom budget exceeded");
  };
  Spectrum spec = fourier_transform(to_truth_table(t));
  for (Subset s = 0; s < spec.size(); ++s) {
    std::int64_t w = spec.scaled(s);
    if (w == 0) continue;
    mpq_class mass(mpz_class(static_cast<long>(w)) * static_cast<long>(w),
                   mpz_class(1) << (2 * t.n()));
    mass.canonicalize();
    if (s == 0)
      atoms[std::string()] += mass;
    else
      rec(rec, t.root(), s, mass, std::string());
  }
  std::vector<TranscriptAtom> out;
  out.reserve(atoms.size());
  for (auto& [text, p] : atoms) {
    mpq_class q = p;
    q.canonicalize();
    out.push_back(TranscriptAtom{text, q});
  }
  return out;
}

inline mpq_class expected_transcript_length_enumerated(const DecisionTree& t) {
  mpq_class e = 0;
  for (const auto& a : enumerate_transcripts(t))
    e += a.probability * static_cast<unsigned long>(a.text.size());
  return e;
}

/// Almost prefix-free: no reachable transcript is a proper prefix of
/// another, except that the empty transcript (for S = {}) prefixes all.
inline bool almost_prefix_free(const std::vector<TranscriptAtom>& atoms) {
  std::vector<std::string> texts;
  for (const auto& a : atoms)
    if (!a.text.empty()) texts.push_back(a.text);
  std::sort(texts.begin(), texts.end());
  for (std::size_t i = 0; i + 1 < texts.size(); ++i)
    if (texts[i + 1].compare(0, texts[i].size(), texts[i]) == 0) return false;
  return true;
}

}  // namespace feikit
