// Trace the spectral-sample protocol on a small tree: sample sets from the
// spectral distribution, encode them, and compare the empirical transcript
// length with the exact expectation and its budgets.

#include <cstdio>

#include "feikit/feikit.hpp"

using namespace feikit;

int main() {
  DecisionTree tree = DecisionTree::parse("(1 (5 +1 (3 -1 +1)) (3 -1 +1))");
  TruthTable f = to_truth_table(tree);
  Spectrum spec = fourier_transform(f);

  std::printf("tree %s\n", tree.format().c_str());
  std::printf("  expected depth %s, max read %d\n", tree.expected_depth().to_string().c_str(),
              tree.max_read());
  std::printf("  Cov[T] = %s\n", tree_covariance(tree).total.to_string().c_str());

  SplitMix64 rng(kDefaultSeed);
  SpectralSampler sampler(spec);
  SubtreeSpectra table(tree);
  std::printf("  ten protocol runs:\n");
  for (int i = 0; i < 10; ++i) {
    Subset s = sampler.sample(rng);
    Transcript tr = encode(table, s, rng);
    std::printf("    S = %-3u -> %-10s -> decoded %u\n", s,
                tr.empty() ? "(empty)" : tr.text().c_str(), decode(tree, tr));
  }

  ProtocolLengthReport rep = protocol_length_report(tree);
  std::printf("  E|P(X)| = %s\n", rep.expected_length.to_string().c_str());
  std::printf("  4 Inf + 2 Cov   = %s\n", rep.influence_cov_budget.to_string().c_str());
  std::printf("  (2k+2) Inf      = %s\n", rep.read_budget.to_string().c_str());
  std::printf("  4 Inf + 2 depth = %s\n", rep.depth_budget.to_string().c_str());

  EntropyBudgetReport er = entropy_budget_report(tree);
  std::printf("  H = %.6f <= log2(3) E|P| + 2 Inf = %.6f\n", er.entropy, er.apf_chain_bound);
  return 0;
}
