#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "feikit/bits.hpp"
#include "feikit/boolfn.hpp"
#include "feikit/dyadic.hpp"
#include "feikit/errors.hpp"
#include "feikit/spectrum.hpp"
#include "feikit/truth_table.hpp"

namespace feikit {

/// Binary decision tree over variables 1..n.  Internal nodes query a
/// variable; the left subtree is taken when the queried bit is +1, the
/// right subtree when it is -1.  No variable repeats on any root-to-leaf
/// path (enforced at construction), which in particular means a root
/// variable occurs nowhere else in the tree.
///
/// Text form (whitespace-insensitive s-expressions):
///   tree := "+1" | "-1" | "(" var tree tree ")"
/// with left = the x_var = +1 branch.  `(1 +1 -1)` is the dictator x_1.
class DecisionTree {
 public:
  struct Node {
    int var = 0;  // 0 for leaves
    int left = -1;
    int right = -1;
    int value = 0;  // +-1, leaves only
    bool is_leaf() const { return var == 0; }
  };

  class Builder {
   public:
    int add_leaf(int value) {
      if (value != 1 && value != -1) throw DomainError("tree leaf value must be +1 or -1");
      nodes_.push_back(Node{0, -1, -1, value});
      return static_cast<int>(nodes_.size()) - 1;
    }
    int add_internal(int var, int left, int right) {
      if (var < 1 || var > kMaxVars)
        throw DomainError("tree variable index out of range: " + std::to_string(var));
      nodes_.push_back(Node{var, left, right, 0});
      return static_cast<int>(nodes_.size()) - 1;
    }
    DecisionTree finish(int root, int n = 0) {
      DecisionTree t;
      t.nodes_ = std::move(nodes_);
      t.root_ = root;
      t.validate_structure();
      t.set_n(n == 0 ? std::max(1, t.max_var()) : n);
      return t;
    }

   private:
    std::vector<Node> nodes_;
  };

  static DecisionTree leaf(int value, int n = 1) {
    Builder b;
    int id = b.add_leaf(value);
    return b.finish(id, n);
  }

  static DecisionTree parse(std::string_view text, int n = 0) {
    Parser p{text, 0};
    Builder b;
    int root = parse_node(p, b);
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("tree: trailing characters after expression");
    return b.finish(root, n);
  }

  int n() const { return n_; }

  /// Widen the variable range (f gains irrelevant variables).
  void set_n(int n) {
    if (n < max_var())
      throw DomainError("tree mentions variable " + std::to_string(max_var()) +
                        " but n=" + std::to_string(n));
    if (n < 1 || n > kMaxVars)
      throw DomainError("tree: n must be in [1, " + std::to_string(kMaxVars) + "]");
    n_ = n;
  }

  int root() const { return root_; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int node_count() const { return static_cast<int>(nodes_.size()); }

  int internal_count() const {
    int c = 0;
    for (const auto& nd : nodes_) c += nd.is_leaf() ? 0 : 1;
    return c;
  }

  int max_var() const {
    int m = 0;
    for (const auto& nd : nodes_)
      if (!nd.is_leaf() && nd.var > m) m = nd.var;
    return m;
  }

  int depth() const { return depth_below(root_); }

  int eval(std::uint32_t x) const {
    int id = root_;
    while (!node(id).is_leaf())
      id = ((x >> (node(id).var - 1)) & 1u) ? node(id).right : node(id).left;
    return node(id).value;
  }

  /// Number of times each variable is queried; index 0 unused.
  std::vector<int> read_counts() const {
    std::vector<int> c(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& nd : nodes_)
      if (!nd.is_leaf()) ++c[static_cast<std::size_t>(nd.var)];
    return c;
  }

  /// Largest read count over the variables that appear (0 for a bare leaf).
  int max_read() const {
    int m = 0;
    for (int c : read_counts()) m = std::max(m, c);
    return m;
  }

  /// m_T(S): max over i in S of the read count of x_i.  S must be nonempty.
  int read_multiplicity(Subset s) const {
    if (s == 0) throw DomainError("read_multiplicity: empty set");
    auto counts = read_counts();
    int m = 0;
    for (int i = 1; i <= n_; ++i)
      if (subset_contains(s, i)) m = std::max(m, counts[static_cast<std::size_t>(i)]);
    return m;
  }

  /// Sum over internal nodes of 2^-depth(v); equals the expected number of
  /// queries on a uniform input.
  Dyadic expected_depth() const {
    Dyadic total;
    walk_internal([&](int, int d, const std::string&) { total += Dyadic(1).halved(static_cast<unsigned>(d)); });
    return total;
  }

  std::string format() const { return format_node(root_); }

  /// Pre-order visit of internal nodes with depth and the 0/1 path from the
  /// root ("" for the root, '0' = left).
  template <typename Fn>
  void walk_internal(Fn&& fn) const {
    walk_rec(root_, 0, std::string(), fn);
  }

 private:
  struct Parser {
    std::string_view text;
    std::size_t pos;
    void skip_ws() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
      skip_ws();
      if (pos >= text.size()) throw ParseError("tree: unexpected end of input");
      return text[pos];
    }
    std::string token() {
      skip_ws();
      std::size_t start = pos;
      while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
             text[pos] != '(' && text[pos] != ')')
        ++pos;
      if (start == pos) throw ParseError("tree: expected token");
      return std::string(text.substr(start, pos - start));
    }
  };

  static int parse_node(Parser& p, Builder& b) {
    if (p.peek() == '(') {
      ++p.pos;
      std::string v = p.token();
      int var = 0;
      try {
        std::size_t used = 0;
        var = std::stoi(v, &used);
        if (used != v.size()) throw ParseError("");
      } catch (...) {
        throw ParseError("tree: bad variable token '" + v + "'");
      }
      if (var < 1) throw ParseError("tree: variable index must be positive, got '" + v + "'");
      int left = parse_node(p, b);
      int right = parse_node(p, b);
      if (p.peek() != ')') throw ParseError("tree: expected ')'");
      ++p.pos;
      return b.add_internal(var, left, right);
    }
    std::string t = p.token();
    if (t == "+1") return b.add_leaf(+1);
    if (t == "-1") return b.add_leaf(-1);
    throw ParseError("tree: expected leaf '+1' or '-1', got '" + t + "'");
  }

  std::string format_node(int id) const {
    const Node& nd = node(id);
    if (nd.is_leaf()) return nd.value == 1 ? "+1" : "-1";
    return "(" + std::to_string(nd.var) + " " + format_node(nd.left) + " " +
           format_node(nd.right) + ")";
  }

  int depth_below(int id) const {
    const Node& nd = node(id);
    if (nd.is_leaf()) return 0;
    return 1 + std::max(depth_below(nd.left), depth_below(nd.right));
  }

  template <typename Fn>
  void walk_rec(int id, int d, const std::string& path, Fn& fn) const {
    const Node& nd = node(id);
    if (nd.is_leaf()) return;
    fn(id, d, path);
    walk_rec(nd.left, d + 1, path + "0", fn);
    walk_rec(nd.right, d + 1, path + "1", fn);
  }

  void validate_structure() const {
    if (root_ < 0 || root_ >= node_count()) throw DomainError("tree: bad root id");
    std::vector<char> seen(nodes_.size(), 0);
    validate_rec(root_, 0u, seen);
  }

  void validate_rec(int id, std::uint32_t path_vars, std::vector<char>& seen) const {
    if (id < 0 || id >= node_count()) throw DomainError("tree: dangling child id");
    if (seen[static_cast<std::size_t>(id)]) throw DomainError("tree: node is shared, not a tree");
    seen[static_cast<std::size_t>(id)] = 1;
    const Node& nd = node(id);
    if (nd.is_leaf()) return;
    std::uint32_t bit = std::uint32_t{1} << (nd.var - 1);
    if (path_vars & bit)
      throw DomainError("tree: variable " + std::to_string(nd.var) +
                        " repeats on a root-to-leaf path");
    validate_rec(nd.left, path_vars | bit, seen);
    validate_rec(nd.right, path_vars | bit, seen);
  }

  std::vector<Node> nodes_;
  int root_ = -1;
  int n_ = 1;
};

namespace detail {

inline std::vector<std::uint64_t> node_words(const DecisionTree& t, int id,
                                             std::size_t word_count) {
  const auto& nd = t.node(id);
  if (nd.is_leaf())
    return std::vector<std::uint64_t>(word_count, nd.value == -1 ? ~0ull : 0ull);
  std::vector<std::uint64_t> l = node_words(t, nd.left, word_count);
  std::vector<std::uint64_t> r = node_words(t, nd.right, word_count);
  int b = nd.var - 1;
  for (std::size_t w = 0; w < word_count; ++w) {
    std::uint64_t m = variable_word_mask(b, w);  // bits where x_var = -1
    l[w] = (l[w] & ~m) | (r[w] & m);
  }
  return l;
}

}  // namespace detail

/// Evaluates the tree on all 2^n inputs via word-parallel mask combination.
inline TruthTable to_truth_table(const DecisionTree& t) {
  std::size_t words = t.n() <= 6 ? 1 : (std::size_t{1} << (t.n() - 6));
  return TruthTable::from_words(t.n(), detail::node_words(t, t.root(), words));
}

/// The function computed by each node's subtree, as an n-variable table,
/// indexed by node id.
inline std::vector<TruthTable> node_truth_tables(const DecisionTree& t) {
  std::size_t words = t.n() <= 6 ? 1 : (std::size_t{1} << (t.n() - 6));
  std::vector<TruthTable> out(static_cast<std::size_t>(t.node_count()), TruthTable(t.n()));
  // Bottom-up: children have larger... ids are in construction order, so
  // recurse explicitly instead of assuming an ordering.
  auto rec = [&](auto&& self, int id) -> void {
    const auto& nd = t.node(id);
    if (!nd.is_leaf()) {
      self(self, nd.left);
      self(self, nd.right);
    }
    out[static_cast<std::size_t>(id)] =
        TruthTable::from_words(t.n(), detail::node_words(t, id, words));
  };
  rec(rec, t.root());
  return out;
}

/// Cov[g,h] = E[gh] - E[g]E[h] for the two +-1-valued tables, exactly.
inline Dyadic covariance(const TruthTable& g, const TruthTable& h) {
  std::uint64_t differing = 0;
  for (std::size_t w = 0; w < g.words().size(); ++w)
    differing += popcount(g.words()[w] ^ h.words()[w]);
  // E[gh] = (2^n - 2*differing) / 2^n
  Dyadic egh = Dyadic::from_scaled(
      static_cast<std::int64_t>(g.num_inputs()) - 2 * static_cast<std::int64_t>(differing),
      static_cast<unsigned>(g.n()));
  return egh - mean(g) * mean(h);
}

/// Tree covariance Cov[T] = sum over internal v of Cov[v] * 2^-depth(v),
/// where Cov[v] is the covariance of the functions computed by v's two
/// subtrees, together with its per-variable and per-node decomposition.
struct CovReport {
  Dyadic total;
  std::map<int, Dyadic> per_variable;                      // Cov_i[T]
  std::vector<std::pair<std::string, Dyadic>> per_node;    // root-path -> Cov[v]
};

inline CovReport tree_covariance(const DecisionTree& t) {
  std::vector<TruthTable> tables = node_truth_tables(t);
  CovReport rep;
  t.walk_internal([&](int id, int depth, const std::string& path) {
    const auto& nd = t.node(id);
    Dyadic cov_v = covariance(tables[static_cast<std::size_t>(nd.left)],
                              tables[static_cast<std::size_t>(nd.right)]);
    rep.per_node.emplace_back(path, cov_v);
    Dyadic weighted = cov_v.halved(static_cast<unsigned>(depth));
    rep.total += weighted;
    rep.per_variable[nd.var] += weighted;
  });
  return rep;
}

/// Same quantity through the recursion Cov[T] = Cov[g,h] + (Cov[T0]+Cov[T1])/2,
/// with Cov = 0 for leaves.  Used as the independent second route in tests.
inline Dyadic tree_covariance_recursive(const DecisionTree& t) {
  std::vector<TruthTable> tables = node_truth_tables(t);
  auto rec = [&](auto&& self, int id) -> Dyadic {
    const auto& nd = t.node(id);
    if (nd.is_leaf()) return Dyadic();
    Dyadic cov_v = covariance(tables[static_cast<std::size_t>(nd.left)],
                              tables[static_cast<std::size_t>(nd.right)]);
    return cov_v + (self(self, nd.left) + self(self, nd.right)).halved();
  };
  return rec(rec, t.root());
}

/// The three covariance upper bounds, checked exactly:
///   Cov[T] <= expected depth,
///   Cov[T] <= (k-1) * Var[f]   for a read-k tree,
///   Cov[T] <= sum over S != {} of (m_T(S) - 1) * f^(S)^2.
struct CovarianceBounds {
  Dyadic cov;
  Dyadic expected_depth;
  Dyadic variance;
  Dyadic multiplicity_rhs;
  int max_read = 0;
  bool depth_bound = false;
  bool read_bound = false;
  bool multiplicity_bound = false;
  bool all_hold() const { return depth_bound && read_bound && multiplicity_bound; }
};

inline CovarianceBounds covariance_bounds_report(const DecisionTree& t, const Spectrum& spec) {
  CovarianceBounds rep;
  rep.cov = tree_covariance(t).total;
  rep.expected_depth = t.expected_depth();
  rep.variance = variance(spec);
  rep.max_read = t.max_read();

  auto counts = t.read_counts();
  std::vector<int> mult(spec.size(), 0);  // m_T(S), DP over lowest bit
  mpz_class acc = 0;
  for (Subset s = 1; s < spec.size(); ++s) {
    int low_var = std::countr_zero(s) + 1;
    mult[s] = std::max(mult[s & (s - 1)], counts[static_cast<std::size_t>(low_var)]);
    std::int64_t w = spec.scaled(s);
    if (w != 0 && mult[s] > 1)
      acc += mpz_class(mult[s] - 1) * (mpz_class(static_cast<long>(w)) * static_cast<long>(w));
  }
  rep.multiplicity_rhs = Dyadic(acc, 2u * spec.n());

  rep.depth_bound = rep.cov <= rep.expected_depth;
  rep.read_bound = rep.cov <= Dyadic(rep.max_read - 1) * rep.variance;
  rep.multiplicity_bound = rep.cov <= rep.multiplicity_rhs;
  return rep;
}

inline CovarianceBounds covariance_bounds_report(const DecisionTree& t) {
  return covariance_bounds_report(t, fourier_transform(to_truth_table(t)));
}

/// With x_i at the root and g, h the subtree functions: for every
/// S not containing i,  f^(S)^2 + f^(S+i)^2 = (g^(S)^2 + h^(S)^2) / 2.
/// Checked exhaustively and exactly.  Throws for a bare leaf.
inline bool subtree_square_identity_holds(const DecisionTree& t) {
  const auto& root = t.node(t.root());
  if (root.is_leaf()) throw DomainError("subtree identity: tree is a bare leaf");
  std::vector<TruthTable> tables = node_truth_tables(t);
  Spectrum f = fourier_transform(tables[static_cast<std::size_t>(t.root())]);
  Spectrum g = fourier_transform(tables[static_cast<std::size_t>(root.left)]);
  Spectrum h = fourier_transform(tables[static_cast<std::size_t>(root.right)]);
  std::uint32_t bit = std::uint32_t{1} << (root.var - 1);
  for (Subset s = 0; s < f.size(); ++s) {
    if (s & bit) continue;
    std::int64_t wf0 = f.scaled(s), wf1 = f.scaled(s | bit);
    std::int64_t wg = g.scaled(s), wh = h.scaled(s);
    if (2 * (wf0 * wf0 + wf1 * wf1) != wg * wg + wh * wh) return false;
  }
  return true;
}

/// Same setup: Inf_j[f] = (Inf_j[g] + Inf_j[h]) / 2 for every j != i.
inline bool subtree_influence_identity_holds(const DecisionTree& t) {
  const auto& root = t.node(t.root());
  if (root.is_leaf()) throw DomainError("subtree identity: tree is a bare leaf");
  std::vector<TruthTable> tables = node_truth_tables(t);
  const TruthTable& f = tables[static_cast<std::size_t>(t.root())];
  const TruthTable& g = tables[static_cast<std::size_t>(root.left)];
  const TruthTable& h = tables[static_cast<std::size_t>(root.right)];
  for (int j = 1; j <= t.n(); ++j) {
    if (j == root.var) continue;
    if (Dyadic(2) * influence(f, j) != influence(g, j) + influence(h, j)) return false;
  }
  return true;
}

/// Root-influence bound: with x_i at the root,
///   Inf_i[f] >= Var[f]/2 - Cov[root]/2,  exactly.
inline bool root_influence_bound_holds(const DecisionTree& t) {
  const auto& root = t.node(t.root());
  if (root.is_leaf()) throw DomainError("root influence bound: tree is a bare leaf");
  std::vector<TruthTable> tables = node_truth_tables(t);
  const TruthTable& f = tables[static_cast<std::size_t>(t.root())];
  Dyadic cov_root = covariance(tables[static_cast<std::size_t>(root.left)],
                               tables[static_cast<std::size_t>(root.right)]);
  return Dyadic(2) * influence(f, root.var) + cov_root >= variance(f);
}

/// Scaled Fourier coefficient f^_v(S) * 2^n of the subtree rooted at node id,
/// computed in O(subtree size) without materializing the subtree's spectrum.
inline std::int64_t subtree_scaled_coefficient(const DecisionTree& t, int id, Subset s) {
  const auto& nd = t.node(id);
  if (nd.is_leaf()) return s == 0 ? (static_cast<std::int64_t>(nd.value) << t.n()) : 0;
  std::uint32_t bit = std::uint32_t{1} << (nd.var - 1);
  if (s & bit) {
    return (subtree_scaled_coefficient(t, nd.left, s & ~bit) -
            subtree_scaled_coefficient(t, nd.right, s & ~bit)) / 2;
  }
  return (subtree_scaled_coefficient(t, nd.left, s) +
          subtree_scaled_coefficient(t, nd.right, s)) / 2;
}

/// Scaled spectra of every subtree, for hot loops that query many
/// coefficients (the protocol encoder).  Memory is node_count * 2^n * 8
/// bytes, so this is kept for small n.
class SubtreeSpectra {
 public:
  explicit SubtreeSpectra(const DecisionTree& t) : tree_(&t) {
    if (t.n() > 16) throw DomainError("SubtreeSpectra: n too large to tabulate");
    std::size_t size = std::size_t{1} << t.n();
    w_.assign(static_cast<std::size_t>(t.node_count()), {});
    auto rec = [&](auto&& self, int id) -> void {
      const auto& nd = t.node(id);
      auto& mine = w_[static_cast<std::size_t>(id)];
      mine.assign(size, 0);
      if (nd.is_leaf()) {
        mine[0] = static_cast<std::int64_t>(nd.value) << t.n();
        return;
      }
      self(self, nd.left);
      self(self, nd.right);
      const auto& l = w_[static_cast<std::size_t>(nd.left)];
      const auto& r = w_[static_cast<std::size_t>(nd.right)];
      std::uint32_t bit = std::uint32_t{1} << (nd.var - 1);
      for (Subset s = 0; s < size; ++s) {
        if (s & bit)
          mine[s] = (l[s & ~bit] - r[s & ~bit]) / 2;
        else
          mine[s] = (l[s] + r[s]) / 2;
      }
    };
    rec(rec, t.root());
  }

  const DecisionTree& tree() const { return *tree_; }
  std::int64_t scaled(int id, Subset s) const { return w_[static_cast<std::size_t>(id)][s]; }

 private:
  const DecisionTree* tree_;
  std::vector<std::vector<std::int64_t>> w_;
};

}  // namespace feikit
