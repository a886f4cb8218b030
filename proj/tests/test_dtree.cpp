#include <catch2/catch_amalgamated.hpp>

#include "feikit/dtree.hpp"
#include "feikit/harness.hpp"

using namespace feikit;

TEST_CASE("parse and evaluate") {
  DecisionTree d = DecisionTree::parse("(1 +1 -1)");
  CHECK(d.n() == 1);
  CHECK(d.eval(0) == 1);   // x1 = +1 -> left
  CHECK(d.eval(1) == -1);  // x1 = -1 -> right

  DecisionTree leaf = DecisionTree::parse("+1");
  CHECK(to_truth_table(leaf) == TruthTable::constant(1, +1));

  // whitespace-insensitive
  DecisionTree spaced = DecisionTree::parse("  ( 1\n\t+1   (2 -1 +1 ) ) ");
  CHECK(spaced.format() == "(1 +1 (2 -1 +1))");
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(DecisionTree::parse("(1 (1 +1 -1) -1)"), DomainError);  // repeated on path
  CHECK_THROWS_AS(DecisionTree::parse("(1 +1)"), ParseError);
  CHECK_THROWS_AS(DecisionTree::parse("(0 +1 -1)"), ParseError);
  CHECK_THROWS_AS(DecisionTree::parse("(x +1 -1)"), ParseError);
  CHECK_THROWS_AS(DecisionTree::parse("(1 +2 -1)"), ParseError);
  CHECK_THROWS_AS(DecisionTree::parse("(1 +1 -1) junk"), ParseError);
  CHECK_THROWS_AS(DecisionTree::parse(""), ParseError);
  CHECK_THROWS_AS(DecisionTree::parse("(21 +1 -1)"), DomainError);  // var beyond cap
  // same variable on both branches is fine (not on one path)
  CHECK_NOTHROW(DecisionTree::parse("(1 (2 +1 -1) (2 -1 +1))"));
  // n smaller than the largest mentioned variable
  CHECK_THROWS_AS(DecisionTree::parse("(3 +1 -1)", 2), DomainError);
}

TEST_CASE("truth table matches per-input tree walk") {
  SplitMix64 rng(41);
  GenConfig cfg;
  cfg.n = 7;
  cfg.max_read = 3;
  for (int i = 0; i < 100; ++i) {
    DecisionTree t = random_tree(cfg, rng);
    TruthTable f = to_truth_table(t);
    for (std::uint32_t x = 0; x < f.num_inputs(); ++x) REQUIRE(f.eval(x) == t.eval(x));
  }
}

TEST_CASE("expected depth") {
  CHECK(DecisionTree::parse("+1").expected_depth().is_zero());
  CHECK(DecisionTree::parse("(1 +1 -1)").expected_depth() == Dyadic(1));

  // complete tree of depth d has expected depth exactly d
  for (int depth : {2, 3, 4}) {
    DecisionTree::Builder b;
    auto build = [&](auto&& self, int level, int var) -> int {
      if (level == depth) return b.add_leaf(level % 2 ? +1 : -1);
      int l = self(self, level + 1, 2 * var);
      int r = self(self, level + 1, 2 * var + 1);
      return b.add_internal(var, l, r);
    };
    // distinct variable per node, numbered heap-style
    DecisionTree t = b.finish(build(build, 0, 1));
    REQUIRE(t.expected_depth() == Dyadic(depth));
    // Monte-Carlo query-count oracle
    SplitMix64 rng(7);
    double mc = oracles::expected_depth_sampled(t, rng, 20000);
    REQUIRE(mc == Catch::Approx(static_cast<double>(depth)).margin(0.05));
  }
}

TEST_CASE("read multiplicities") {
  DecisionTree ro = DecisionTree::parse("(1 (2 +1 -1) (3 +1 -1))");
  CHECK(ro.max_read() == 1);
  for (Subset s = 1; s < 8; ++s) REQUIRE(ro.read_multiplicity(s) == 1);

  DecisionTree twice = DecisionTree::parse("(1 (2 +1 -1) (2 -1 +1))");
  CHECK(twice.read_multiplicity(0b10) == 2);
  CHECK(twice.read_multiplicity(0b01) == 1);
  CHECK(twice.read_multiplicity(0b11) == 2);
  CHECK(twice.max_read() == 2);
  CHECK_THROWS_AS(twice.read_multiplicity(0), DomainError);

  // one dummy layer over a read-once tree: every inner variable is read twice
  DecisionTree inner = DecisionTree::parse("(1 (2 +1 -1) +1)");
  DecisionTree layered = dummy_layered_tree(1, inner);
  CHECK(layered.read_multiplicity(0b01) == 2);
  CHECK(layered.read_multiplicity(0b10) == 2);
}

TEST_CASE("tree covariance of read-once trees is zero") {
  SplitMix64 rng(43);
  GenConfig cfg;
  cfg.n = 8;
  cfg.max_read = 1;
  for (int i = 0; i < 100; ++i) {
    DecisionTree t = random_tree(cfg, rng);
    REQUIRE(tree_covariance(t).total.is_zero());
  }
}

TEST_CASE("tree covariance of identical subtrees") {
  // both subtrees compute x2, so Cov[root] = Var[x2] = 1 and the child
  // nodes contribute nothing
  DecisionTree t = DecisionTree::parse("(1 (2 +1 -1) (2 +1 -1))");
  CovReport rep = tree_covariance(t);
  CHECK(rep.total == Dyadic(1));
  CHECK(rep.per_variable[1] == Dyadic(1));
  CHECK(rep.per_node.size() == 3);
  CHECK(rep.per_node[0].first == "");
  CHECK(rep.per_node[0].second == Dyadic(1));
  CHECK(rep.per_node[1].first == "0");
  CHECK(rep.per_node[1].second.is_zero());
}

TEST_CASE("covariance recursion equals the node sum") {
  SplitMix64 rng(44);
  GenConfig cfg;
  cfg.n = 8;
  cfg.max_read = 3;
  for (int i = 0; i < 200; ++i) {
    DecisionTree t = random_tree(cfg, rng);
    CovReport rep = tree_covariance(t);
    REQUIRE(tree_covariance_recursive(t) == rep.total);
    Dyadic by_var;
    for (const auto& [v, c] : rep.per_variable) by_var += c;
    REQUIRE(by_var == rep.total);
    // weighted per-node sum is the total as well
    Dyadic by_node;
    std::size_t idx = 0;
    t.walk_internal([&](int, int depth, const std::string&) {
      by_node += rep.per_node[idx++].second.halved(static_cast<unsigned>(depth));
    });
    REQUIRE(by_node == rep.total);
  }
}

TEST_CASE("covariance equals the spectral route") {
  SplitMix64 rng(45);
  for (int i = 0; i < 100; ++i) {
    TruthTable g = TruthTable::random(6, rng);
    TruthTable h = TruthTable::random(6, rng);
    REQUIRE(covariance(g, h) == oracles::covariance_spectral(g, h));
  }
}

TEST_CASE("covariance bounds hold on random read-3 trees") {
  SplitMix64 rng(46);
  GenConfig cfg;
  cfg.n = 8;
  cfg.max_read = 3;
  for (int i = 0; i < 500; ++i) {
    DecisionTree t = random_tree(cfg, rng);
    CovarianceBounds rep = covariance_bounds_report(t);
    REQUIRE(rep.all_hold());
  }
}

TEST_CASE("layered duplicate trees achieve Cov = l Var exactly") {
  DecisionTree inner = DecisionTree::parse("(1 +1 -1)");
  for (int l = 0; l <= 3; ++l) {
    DecisionTree t = dummy_layered_tree(l, inner);
    TruthTable f = to_truth_table(t);
    REQUIRE(tree_covariance(t).total == Dyadic(l) * variance(f));
    REQUIRE(t.max_read() == (1 << l));
    for (int v = 2; v <= t.n(); ++v) REQUIRE(influence(f, v).is_zero());
  }
}

TEST_CASE("subtree identities at the root") {
  // dictator: fhat({})^2 + fhat({1})^2 = (1 + 1)/2 = 1
  CHECK(subtree_square_identity_holds(DecisionTree::parse("(1 +1 -1)")));
  CHECK(subtree_influence_identity_holds(DecisionTree::parse("(1 +1 -1)")));

  // majority as a depth-3 tree
  DecisionTree maj = DecisionTree::parse("(1 (2 +1 (3 +1 -1)) (2 (3 +1 -1) -1))");
  REQUIRE(to_truth_table(maj) == TruthTable::majority3());
  CHECK(subtree_square_identity_holds(maj));
  CHECK(subtree_influence_identity_holds(maj));

  SplitMix64 rng(47);
  GenConfig cfg;
  cfg.n = 8;
  cfg.max_read = 3;
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    DecisionTree t = random_tree(cfg, rng);
    if (t.node(t.root()).is_leaf()) continue;
    ++checked;
    REQUIRE(subtree_square_identity_holds(t));
    REQUIRE(subtree_influence_identity_holds(t));
    REQUIRE(root_influence_bound_holds(t));
  }
  REQUIRE(checked > 100);
  CHECK_THROWS_AS(subtree_square_identity_holds(DecisionTree::parse("+1")), DomainError);
}

TEST_CASE("root influence bound is tight for identical subtrees") {
  // Inf_1 = 0, Var = 1, Cov[root] = 1: 0 >= 1/2 - 1/2
  CHECK(root_influence_bound_holds(DecisionTree::parse("(1 (2 +1 -1) (2 +1 -1))")));
}

TEST_CASE("subtree coefficients: table, recursion and per-node transform agree") {
  SplitMix64 rng(48);
  GenConfig cfg;
  cfg.n = 6;
  cfg.max_read = 2;
  for (int i = 0; i < 50; ++i) {
    DecisionTree t = random_tree(cfg, rng);
    SubtreeSpectra table(t);
    std::vector<TruthTable> tables = node_truth_tables(t);
    for (int id = 0; id < t.node_count(); ++id) {
      Spectrum direct = fourier_transform(tables[static_cast<std::size_t>(id)]);
      for (Subset s = 0; s < direct.size(); ++s) {
        REQUIRE(table.scaled(id, s) == direct.scaled(s));
        REQUIRE(subtree_scaled_coefficient(t, id, s) == direct.scaled(s));
      }
    }
  }
}
