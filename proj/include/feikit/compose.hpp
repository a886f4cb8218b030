#pragma once

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "feikit/biased.hpp"
#include "feikit/coding.hpp"
#include "feikit/distribution.hpp"
#include "feikit/dtree.hpp"
#include "feikit/errors.hpp"
#include "feikit/truth_table.hpp"

namespace feikit {

/// Disjoint composition h(x) = f(g_1(x^1), ..., g_k(x^k)): the outer f reads
/// one bit per block, each inner g_i reads its own block of global variables,
/// and the whole domain carries the product bias mu.
///
/// blocks[i] lists the global variables (1-based) feeding g_i, in the order
/// of g_i's own inputs; the blocks must partition 1..total_vars.
struct Composition {
  TruthTable outer = TruthTable(1);
  std::vector<TruthTable> inner;
  std::vector<std::vector<int>> blocks;
  BiasVector mu;

  int k() const { return outer.n(); }
  int total_vars() const { return mu.n(); }

  void validate() const {
    if (static_cast<int>(inner.size()) != k() || static_cast<int>(blocks.size()) != k())
      throw DomainError("composition: need one inner function and block per outer input");
    int total = 0;
    std::vector<char> used(static_cast<std::size_t>(mu.n()) + 1, 0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (static_cast<int>(blocks[i].size()) != inner[i].n())
        throw DomainError("composition: block size does not match the inner arity");
      for (int v : blocks[i]) {
        if (v < 1 || v > mu.n() || used[static_cast<std::size_t>(v)])
          throw DomainError("composition: blocks must partition the variables");
        used[static_cast<std::size_t>(v)] = 1;
        ++total;
      }
    }
    if (total != mu.n())
      throw DomainError("composition: blocks must cover all " + std::to_string(mu.n()) +
                        " variables");
    if (mu.n() > kMaxVars) throw DomainError("composition: too many variables");
    mu.validate();
  }

  /// Local input of g_i extracted from a global input.
  std::uint32_t local_input(int i, std::uint32_t x) const {
    std::uint32_t out = 0;
    const auto& block = blocks[static_cast<std::size_t>(i)];
    for (std::size_t b = 0; b < block.size(); ++b)
      if ((x >> (block[b] - 1)) & 1u) out |= std::uint32_t{1} << b;
    return out;
  }

  /// Restriction of a global subset to block i, as a local mask.
  Subset local_subset(int i, Subset y) const { return local_input(i, y); }

  /// Embeds a local mask of block i back into global variables.
  Subset embed_subset(int i, Subset local) const {
    Subset out = 0;
    const auto& block = blocks[static_cast<std::size_t>(i)];
    for (std::size_t b = 0; b < block.size(); ++b)
      if ((local >> b) & 1u) out |= Subset{1} << (block[b] - 1);
    return out;
  }

  /// S = { i : Y_i != {} }, as a mask over the outer inputs.
  Subset selector(Subset y) const {
    Subset s = 0;
    for (int i = 0; i < k(); ++i)
      if (local_subset(i, y) != 0) s |= Subset{1} << i;
    return s;
  }

  BiasVector inner_bias(int i) const {
    BiasVector b;
    for (int v : blocks[static_cast<std::size_t>(i)]) b.mu.push_back(mu.bias(v));
    return b;
  }
};

inline TruthTable compose_functions(const Composition& comp) {
  comp.validate();
  TruthTable h(comp.total_vars());
  for (std::uint32_t x = 0; x < h.num_inputs(); ++x) {
    std::uint32_t outer_in = 0;
    for (int i = 0; i < comp.k(); ++i) {
      int gi = comp.inner[static_cast<std::size_t>(i)].eval(comp.local_input(i, x));
      if (gi == -1) outer_in |= std::uint32_t{1} << i;
    }
    h.set(x, comp.outer.eval(outer_in));
  }
  return h;
}

/// Everything the composition analyses need, computed once: the inner
/// spectra under their block biases, eta_i = E_mu[g_i], f's spectrum under
/// eta, and h's spectrum under mu.
struct CompositionAnalysis {
  Composition comp;
  TruthTable h;
  std::vector<BiasedSpectrum> inner;  // g_i under mu restricted to its block
  BiasVector eta;                     // eta_i = E_mu[g_i]
  BiasedSpectrum outer;               // f under eta
  BiasedSpectrum composed;            // h under mu

  explicit CompositionAnalysis(Composition c)
      : comp(std::move(c)),
        h((comp.validate(), compose_functions(comp))),
        inner(make_inner(comp)),
        eta(make_eta(comp, inner)),
        outer(biased_fourier(comp.outer, eta)),
        composed(biased_fourier(h, comp.mu)) {}

 private:
  static std::vector<BiasedSpectrum> make_inner(const Composition& comp) {
    std::vector<BiasedSpectrum> out;
    for (int i = 0; i < comp.k(); ++i)
      out.push_back(biased_fourier(comp.inner[static_cast<std::size_t>(i)], comp.inner_bias(i)));
    return out;
  }
  static BiasVector make_eta(const Composition& comp, const std::vector<BiasedSpectrum>& inner) {
    BiasVector eta;
    for (int i = 0; i < comp.k(); ++i) {
      mpq_class m = inner[static_cast<std::size_t>(i)].mean();
      if (abs(m) >= 1)
        throw DomainError("composition: inner function " + std::to_string(i + 1) +
                          " is constant under mu");
      eta.mu.push_back(m);
    }
    return eta;
  }
};

/// The product rule for coefficients, exactly (squares and signs):
///   h~(Y) = f~(S) * prod_{i in S} g_i~(Y_i) / sigma_i,  S = {i : Y_i != {}},
/// where sigma_i^2 = Var_eta[y_i] = 1 - eta_i^2.
inline bool product_coefficient_identity_holds(const CompositionAnalysis& an) {
  for (Subset y = 0; y < an.composed.size(); ++y) {
    Subset s = an.comp.selector(y);
    mpq_class rhs_sq = an.outer.squared(s);
    int rhs_sign = an.outer.sign(s);
    for (int i = 0; i < an.comp.k(); ++i) {
      if (!((s >> i) & 1u)) continue;
      Subset local = an.comp.local_subset(i, y);
      const BiasedSpectrum& gi = an.inner[static_cast<std::size_t>(i)];
      mpq_class sigma_sq = 1 - an.eta.mu[static_cast<std::size_t>(i)] *
                                   an.eta.mu[static_cast<std::size_t>(i)];
      rhs_sq *= gi.squared(local) / sigma_sq;
      rhs_sign *= gi.sign(local);
    }
    if (an.composed.squared(y) != rhs_sq) return false;
    if (rhs_sq != 0 && an.composed.sign(y) != rhs_sign) return false;
  }
  return true;
}

/// Distributional claims for Y ~ h~^2 \ {}:
///   - S = {i : Y_i != {}} is distributed as f~^2 \ {} under eta;
///   - conditioned on Y_i != {}, Y_i is distributed as g_i~^2 \ {};
///   - the two combine: sampling S then each Y_i independently reproduces
///     h~^2 \ {} exactly.
/// All equalities exact rationals.
inline bool marginal_distribution_claims_hold(const CompositionAnalysis& an) {
  mpq_class var_h = an.composed.variance();
  mpq_class var_f = an.outer.variance();
  if (var_h == 0) throw DomainError("composition: h is constant under mu");

  // mass of each selector pattern and of each (block, local set) pair
  std::map<Subset, mpq_class> sel_mass;
  std::vector<std::map<Subset, mpq_class>> block_mass(static_cast<std::size_t>(an.comp.k()));
  std::vector<mpq_class> block_nonempty(static_cast<std::size_t>(an.comp.k()), mpq_class(0));
  for (Subset y = 0; y < an.composed.size(); ++y) {
    mpq_class m = an.composed.squared(y);
    if (m == 0) continue;
    sel_mass[an.comp.selector(y)] += m;
    for (int i = 0; i < an.comp.k(); ++i) {
      Subset local = an.comp.local_subset(i, y);
      if (local != 0) {
        block_mass[static_cast<std::size_t>(i)][local] += m;
        block_nonempty[static_cast<std::size_t>(i)] += m;
      }
    }
  }

  // Claim: Pr[selector = S] = f~(S)^2 / Var_eta[f] for S != {}; the S = {}
  // pattern carries exactly h~({})^2 = f~({})^2.
  for (Subset s = 0; s < an.outer.size(); ++s) {
    mpq_class lhs = sel_mass.count(s) ? sel_mass[s] : mpq_class(0);
    if (lhs * var_f != an.outer.squared(s) * var_h) return false;
  }

  // Claim: Pr[Y_i = y | Y_i != {}] = g_i~(y)^2 / Var[g_i].
  for (int i = 0; i < an.comp.k(); ++i) {
    const BiasedSpectrum& gi = an.inner[static_cast<std::size_t>(i)];
    mpq_class var_g = gi.variance();
    for (Subset local = 1; local < gi.size(); ++local) {
      mpq_class lhs = block_mass[static_cast<std::size_t>(i)].count(local)
                          ? block_mass[static_cast<std::size_t>(i)][local]
                          : mpq_class(0);
      if (lhs * var_g != gi.squared(local) * block_nonempty[static_cast<std::size_t>(i)])
        return false;
    }
  }

  // Constructive combination, per nonempty Y.
  for (Subset y = 1; y < an.composed.size(); ++y) {
    Subset s = an.comp.selector(y);
    if (s == 0) continue;  // impossible for y != 0 once blocks partition
    mpq_class rhs = an.outer.squared(s) / var_f;
    for (int i = 0; i < an.comp.k(); ++i) {
      if (!((s >> i) & 1u)) continue;
      const BiasedSpectrum& gi = an.inner[static_cast<std::size_t>(i)];
      rhs *= gi.squared(an.comp.local_subset(i, y)) / gi.variance();
    }
    if (an.composed.squared(y) / var_h != rhs) return false;
  }
  return true;
}

/// Prefix-free sub-codes for the composed protocol: one for the selector
/// set S ~ f~^2 \ {} and one per block for Y_i ~ g_i~^2 \ {}.
struct ComposedCodes {
  Code<Subset> selector_code;
  std::vector<Code<Subset>> block_codes;
};

inline ComposedCodes build_huffman_codes(const CompositionAnalysis& an, int sigma = 2) {
  ComposedCodes codes;
  codes.selector_code = huffman_build(an.outer.conditional_nonempty(), sigma);
  for (int i = 0; i < an.comp.k(); ++i)
    codes.block_codes.push_back(
        huffman_build(an.inner[static_cast<std::size_t>(i)].conditional_nonempty(), sigma));
  return codes;
}

/// P_h(Y): emit the selector codeword for S, then each block codeword for
/// Y_i, in increasing block order (the order makes decoding deterministic).
inline std::string composed_encode(const CompositionAnalysis& an, const ComposedCodes& codes,
                                   Subset y) {
  if (y == 0) throw DomainError("composed_encode: defined on nonempty samples only");
  Subset s = an.comp.selector(y);
  std::string out = encode_with(codes.selector_code, s);
  for (int i = 0; i < an.comp.k(); ++i)
    if ((s >> i) & 1u)
      out += encode_with(codes.block_codes[static_cast<std::size_t>(i)],
                         an.comp.local_subset(i, y));
  return out;
}

inline Subset composed_decode(const CompositionAnalysis& an, const ComposedCodes& codes,
                              std::string_view text) {
  std::size_t pos = 0;
  Subset s = prefix_parse(codes.selector_code, text, pos);
  Subset y = 0;
  for (int i = 0; i < an.comp.k(); ++i)
    if ((s >> i) & 1u)
      y |= an.comp.embed_subset(
          i, prefix_parse(codes.block_codes[static_cast<std::size_t>(i)], text, pos));
  if (pos != text.size()) throw ParseError("composed_decode: trailing characters");
  return y;
}

/// Expected composed length, two exact ways:
///   enumeration over Y ~ h~^2 \ {}, and
///   E|P_f(S)| + sum_i Pr[i in S] * E[|P_i(Y_i)| given Y_i != {}].
struct ComposedLength {
  mpq_class by_enumeration;
  mpq_class by_parts;
  bool equal = false;
};

inline ComposedLength composed_expected_length(const CompositionAnalysis& an,
                                               const ComposedCodes& codes) {
  ComposedLength out;
  for (const auto& [y, p] : an.composed.conditional_nonempty().atoms)
    out.by_enumeration += p * static_cast<unsigned long>(composed_encode(an, codes, y).size());
  out.by_parts = expected_length(codes.selector_code, an.outer.conditional_nonempty());
  for (int i = 0; i < an.comp.k(); ++i)
    out.by_parts += an.outer.marginal(i + 1) *
                    expected_length(codes.block_codes[static_cast<std::size_t>(i)],
                                    an.inner[static_cast<std::size_t>(i)].conditional_nonempty());
  out.equal = out.by_enumeration == out.by_parts;
  return out;
}

/// Goodness of the composed protocol at C* = max of the parts' minimal good
/// constants, plus the exact bias/variance bookkeeping the argument uses:
/// eta_i = E_mu[g_i], Var_eta[y_i] = Var_mu[g_i] and Var_eta[f] = Var_mu[h].
struct CompositionGoodnessReport {
  double c_star = 0;
  std::vector<double> component_constants;  // outer first, then blocks
  double composed_length = 0;
  bool c_star_finite = false;
  bool good_at_c_star = false;
  bool length_identity = false;
  bool variance_equalities = false;
  bool prefix_free = false;
  bool all_hold() const {
    return c_star_finite && good_at_c_star && length_identity && variance_equalities &&
           prefix_free;
  }
};

inline CompositionGoodnessReport composition_goodness_report(const CompositionAnalysis& an,
                                                             double tol = 1e-9) {
  ComposedCodes codes = build_huffman_codes(an);
  CompositionGoodnessReport rep;

  double outer_len = expected_length(codes.selector_code, an.outer.conditional_nonempty()).get_d();
  rep.component_constants.push_back(min_good_constant(an.outer, outer_len));
  for (int i = 0; i < an.comp.k(); ++i) {
    const BiasedSpectrum& gi = an.inner[static_cast<std::size_t>(i)];
    double len = expected_length(codes.block_codes[static_cast<std::size_t>(i)],
                                 gi.conditional_nonempty())
                     .get_d();
    rep.component_constants.push_back(min_good_constant(gi, len));
  }
  rep.c_star = *std::max_element(rep.component_constants.begin(), rep.component_constants.end());
  rep.c_star_finite = std::isfinite(rep.c_star);

  ComposedLength len = composed_expected_length(an, codes);
  rep.composed_length = len.by_enumeration.get_d();
  rep.length_identity = len.equal;
  rep.good_at_c_star =
      rep.c_star_finite && is_good_protocol(an.composed, rep.composed_length, rep.c_star, tol);

  bool var_ok = an.outer.variance() == an.composed.variance() &&
                an.outer.mean() == an.composed.mean();
  for (int i = 0; i < an.comp.k() && var_ok; ++i) {
    const mpq_class& eta_i = an.eta.mu[static_cast<std::size_t>(i)];
    var_ok = (1 - eta_i * eta_i) == an.inner[static_cast<std::size_t>(i)].variance();
  }
  rep.variance_equalities = var_ok;

  // The concatenated code over h's nonempty support.
  Code<Subset> flat;
  flat.alphabet_size = codes.selector_code.alphabet_size;
  for (const auto& [y, p] : an.composed.conditional_nonempty().atoms)
    flat.words.emplace_back(y, composed_encode(an, codes, y));
  rep.prefix_free = is_prefix_free(flat);
  return rep;
}

/// Finite-t shadow of the parallelized composition argument: block-code t
/// i.i.d. selector samples, and per block the (binomially many) nonempty
/// block samples.  The per-copy expected length lands within (k+1)/t of
///   H[f~^2 \ {}] + sum_i Pr[i in S] H[g_i~^2 \ {}]
/// (one +1 per Huffman sub-code).  Everything except entropies is exact.
struct BlockProtocolReport {
  int t = 1;
  double per_copy_length = 0;
  double target = 0;
  double excess = 0;
  double slack_budget = 0;  // (k+1)/t
  bool within_budget = false;
};

inline BlockProtocolReport block_protocol_report(const CompositionAnalysis& an, int t,
                                                 std::size_t max_support = 1000000,
                                                 double tol = 1e-9) {
  BlockProtocolReport rep;
  rep.t = t;
  Distribution<Subset> df = an.outer.conditional_nonempty();
  mpq_class total = expected_length(block_code(df, t, 2, max_support),
                                    power_distribution(df, t, max_support));
  rep.target = df.entropy_bits();
  for (int i = 0; i < an.comp.k(); ++i) {
    Distribution<Subset> dg = an.inner[static_cast<std::size_t>(i)].conditional_nonempty();
    mpq_class p = an.outer.marginal(i + 1);
    rep.target += p.get_d() * dg.entropy_bits();
    // E over m ~ Bin(t, p) of the optimal m-tuple expected length
    mpq_class acc = 0;
    for (int m = 1; m <= t; ++m) {
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(t),
                   static_cast<unsigned long>(m));
      mpq_class weight = binom;
      for (int j = 0; j < m; ++j) weight *= p;
      for (int j = 0; j < t - m; ++j) weight *= (1 - p);
      acc += weight * expected_length(block_code(dg, m, 2, max_support),
                                      power_distribution(dg, m, max_support));
    }
    total += acc;
  }
  rep.per_copy_length = mpq_class(total / t).get_d();
  rep.excess = rep.per_copy_length - rep.target;
  rep.slack_budget = static_cast<double>(an.comp.k() + 1) / t;
  rep.within_budget = rep.excess <= rep.slack_budget + tol;
  return rep;
}

/// JSON manifest: outer function (tree DSL or table), inner tables, block
/// assignments, bias vector as exact rationals.
inline Composition read_composition_manifest(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(std::string("manifest: bad JSON: ") + e.what());
  }
  auto table_from = [](const nlohmann::json& tj) {
    std::istringstream ss("n=" + std::to_string(tj.at("n").get<int>()) + "\n" +
                          tj.at("hex").get<std::string>() + "\n");
    return TruthTable::read(ss);
  };
  Composition comp;
  try {
    const auto& outer = j.at("outer");
    if (outer.contains("tree"))
      comp.outer = to_truth_table(DecisionTree::parse(outer.at("tree").get<std::string>()));
    else
      comp.outer = table_from(outer.at("table"));
    for (const auto& tj : j.at("inner")) comp.inner.push_back(table_from(tj));
    for (const auto& bj : j.at("blocks")) comp.blocks.push_back(bj.get<std::vector<int>>());
    for (const auto& mj : j.at("bias")) {
      mpq_class q(mj.get<std::string>());
      q.canonicalize();
      comp.mu.mu.push_back(q);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  comp.validate();
  return comp;
}

inline void write_composition_manifest(std::ostream& out, const Composition& comp) {
  nlohmann::ordered_json j;
  auto table_to = [](const TruthTable& t) {
    std::ostringstream ss;
    t.write(ss);
    std::string text = ss.str();
    std::size_t nl = text.find('\n');
    nlohmann::ordered_json tj;
    tj["n"] = t.n();
    tj["hex"] = text.substr(nl + 1, text.size() - nl - 2);
    return tj;
  };
  j["outer"]["table"] = table_to(comp.outer);
  j["inner"] = nlohmann::ordered_json::array();
  for (const auto& g : comp.inner) j["inner"].push_back(table_to(g));
  j["blocks"] = comp.blocks;
  j["bias"] = nlohmann::ordered_json::array();
  for (const auto& m : comp.mu.mu) j["bias"].push_back(m.get_str());
  out << j.dump(2) << "\n";
}

}  // namespace feikit
