#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "feikit/boolfn.hpp"
#include "feikit/dtree.hpp"
#include "feikit/errors.hpp"
#include "feikit/prng.hpp"
#include "feikit/spectrum.hpp"
#include "feikit/truth_table.hpp"

namespace feikit {

/// Default seed for every randomized entry point; all randomness in the
/// toolkit flows from one seed so identical invocations reproduce byte-
/// identical reports.
inline constexpr std::uint64_t kDefaultSeed = 1729;

struct GenConfig {
  int n = 8;
  int max_read = 3;
  double target_depth = 4.0;
  double leaf_bias = 0.5;  // probability of a +1 leaf
  std::uint64_t seed = kDefaultSeed;
  int trials = 1000;

  void validate() const {
    if (n < 1 || n > kMaxVars) throw DomainError("config: n out of range");
    if (max_read < 1) throw DomainError("config: max_read must be >= 1");
    if (trials < 1) throw DomainError("config: trials must be >= 1");
    if (leaf_bias < 0.0 || leaf_bias > 1.0) throw DomainError("config: leaf_bias out of [0,1]");
  }
};

/// Random decision tree by recursive growth: at each position, stop with
/// probability 1/(1+target_depth) (or when no variable is available), and
/// otherwise query a variable that is neither on the current path nor
/// exhausted against the read budget.  Growth is rejection-based with a
/// 10^4-attempt cap; the structural validator runs on every output.
inline DecisionTree random_tree(const GenConfig& cfg, SplitMix64& rng) {
  cfg.validate();
  double stop = 1.0 / (1.0 + std::max(0.0, cfg.target_depth));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    DecisionTree::Builder b;
    std::vector<int> counts(static_cast<std::size_t>(cfg.n) + 1, 0);
    auto grow = [&](auto&& self, std::uint32_t path, int depth) -> int {
      std::vector<int> avail;
      for (int v = 1; v <= cfg.n; ++v)
        if (!(path & (std::uint32_t{1} << (v - 1))) && counts[static_cast<std::size_t>(v)] < cfg.max_read)
          avail.push_back(v);
      if (avail.empty() || depth >= cfg.n || rng.unit() < stop)
        return b.add_leaf(rng.unit() < cfg.leaf_bias ? +1 : -1);
      int var = avail[rng.below(avail.size())];
      ++counts[static_cast<std::size_t>(var)];
      int l = self(self, path | (std::uint32_t{1} << (var - 1)), depth + 1);
      int r = self(self, path | (std::uint32_t{1} << (var - 1)), depth + 1);
      return b.add_internal(var, l, r);
    };
    int root = grow(grow, 0u, 0);
    try {
      DecisionTree t = b.finish(root, cfg.n);
      if (t.max_read() <= cfg.max_read) return t;
    } catch (const DomainError&) {
      // resample
    }
  }
  throw DomainError("random_tree: could not satisfy the constraints in 10^4 attempts");
}

/// A complete depth-l tree of fresh dummy variables with a copy of `inner`
/// at each of its 2^l level-l positions.  Every dummy variable has zero
/// influence, Cov[T] = l * Var[f] exactly, and each inner variable is read
/// 2^l times.  l = 0 returns a copy of `inner` itself.
inline DecisionTree dummy_layered_tree(int layers, const DecisionTree& inner) {
  if (layers < 0) throw DomainError("dummy_layered_tree: layers must be >= 0");
  int dummies = (1 << layers) - 1;
  if (inner.n() + dummies > kMaxVars)
    throw DomainError("dummy_layered_tree: would exceed " + std::to_string(kMaxVars) +
                      " variables");
  DecisionTree::Builder b;
  auto clone = [&](auto&& self, int id) -> int {
    const auto& nd = inner.node(id);
    if (nd.is_leaf()) return b.add_leaf(nd.value);
    int l = self(self, nd.left);
    int r = self(self, nd.right);
    return b.add_internal(nd.var, l, r);
  };
  int next_dummy = inner.n() + 1;
  auto build = [&](auto&& self, int depth) -> int {
    if (depth == layers) return clone(clone, inner.root());
    int var = next_dummy++;
    int l = self(self, depth + 1);
    int r = self(self, depth + 1);
    return b.add_internal(var, l, r);
  };
  int root = build(build, 0);
  return b.finish(root, inner.n() + dummies);
}

/// The small-influence construction: on top of a balanced f on n variables,
///   g(x, y) = f(x) if y_1 = ... = y_k = -1, and +1 otherwise,
/// with y occupying variables n+1..n+k.  Then Inf[g] = (k + Inf[f]) / 2^k,
/// each Inf_{y_i}[g] = 2^-k, each Inf_{x_i}[g] = Inf_i[f] / 2^k, and for
/// nonempty S in the y-block and T in the x-block,
///   g^(S,T) = (-1)^|S| f^(T) / 2^k.
inline TruthTable small_influence_gadget(const TruthTable& f, int k) {
  if (!f.is_balanced())
    throw DomainError("small_influence_gadget: f must be balanced (E[f] = 0); "
                      "use balanced_extension() first");
  if (k < 1) throw DomainError("small_influence_gadget: k must be >= 1");
  if (f.n() + k > kMaxVars)
    throw DomainError("small_influence_gadget: would exceed " + std::to_string(kMaxVars) +
                      " variables");
  TruthTable g(f.n() + k);
  std::uint32_t x_mask = f.num_inputs() - 1;
  std::uint32_t y_all = ((std::uint32_t{1} << k) - 1) << f.n();
  for (std::uint32_t j = 0; j < g.num_inputs(); ++j)
    g.set(j, (j & y_all) == y_all ? f.eval(j & x_mask) : +1);
  return g;
}

namespace oracles {

/// Direct O(4^n) transform: w(S) = sum_j f(x_j) (-1)^popcount(S & j).
/// Independent of the butterfly implementation it is tested against.
inline Spectrum naive_fourier(const TruthTable& f) {
  Spectrum spec(f.n());
  for (Subset s = 0; s < spec.size(); ++s) {
    std::int64_t acc = 0;
    for (std::uint32_t j = 0; j < f.num_inputs(); ++j)
      acc += (popcount(s & j) & 1) ? -f.eval(j) : f.eval(j);
    spec.scaled(s) = acc;
  }
  return spec;
}

/// Inf_i via the spectral formula sum_{S ni i} f^(S)^2 (the flip-count route
/// lives in boolfn::influence).
inline Dyadic influence_spectral(const Spectrum& s, int var) { return influence(s, var); }

/// Cov[g,h] via spectra: sum_{S != {}} g^(S) h^(S).  Second route against
/// the popcount-based covariance().
inline Dyadic covariance_spectral(const TruthTable& g, const TruthTable& h) {
  Spectrum gs = fourier_transform(g);
  Spectrum hs = fourier_transform(h);
  mpz_class acc = 0;
  for (Subset s = 1; s < gs.size(); ++s)
    acc += mpz_class(static_cast<long>(gs.scaled(s))) * static_cast<long>(hs.scaled(s));
  return Dyadic(acc, 2u * static_cast<unsigned>(g.n()));
}

/// Monte-Carlo query count on uniform inputs.
inline double expected_depth_sampled(const DecisionTree& t, SplitMix64& rng, int samples) {
  std::uint64_t total = 0;
  for (int s = 0; s < samples; ++s) {
    std::uint32_t x = static_cast<std::uint32_t>(rng.bits(t.n()));
    int id = t.root();
    while (!t.node(id).is_leaf()) {
      ++total;
      id = ((x >> (t.node(id).var - 1)) & 1u) ? t.node(id).right : t.node(id).left;
    }
  }
  return static_cast<double>(total) / samples;
}

}  // namespace oracles

/// Worker cap: FEI_THREADS, else hardware concurrency.
inline int thread_cap() {
  if (const char* env = std::getenv("FEI_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(trial) for every trial index and returns the results in trial
/// order.  Each trial derives its own seed, so the result vector does not
/// depend on the thread schedule.
template <typename R, typename Fn>
std::vector<R> parallel_map(int trials, Fn&& fn) {
  std::vector<R> out(static_cast<std::size_t>(trials));
  int workers = std::min(thread_cap(), trials);
  if (workers <= 1) {
    for (int i = 0; i < trials; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  auto body = [&]() {
    for (int i = next.fetch_add(1); i < trials; i = next.fetch_add(1))
      out[static_cast<std::size_t>(i)] = fn(i);
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace feikit
