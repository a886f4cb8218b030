// Walk through the basic quantities for majority-of-three: exact spectrum,
// influences, spectral entropy, and a Huffman code for the conditioned
// spectral sample.

#include <cstdio>

#include "feikit/feikit.hpp"

using namespace feikit;

int main() {
  TruthTable f = TruthTable::majority3();
  Spectrum spec = fourier_transform(f);

  std::printf("majority of three\n");
  std::printf("  mean      %s\n", mean(f).to_string().c_str());
  std::printf("  variance  %s\n", variance(f).to_string().c_str());
  for (int i = 1; i <= f.n(); ++i)
    std::printf("  Inf_%d     %s\n", i, influence(f, i).to_string().c_str());
  std::printf("  Inf       %s\n", total_influence(f).to_string().c_str());

  std::printf("  spectrum:\n");
  for (Subset s : spec.support())
    std::printf("    mask %u -> %s\n", s, spec.coefficient(s).to_string().c_str());
  std::printf("  spectral entropy %.6f bits\n", spec.spectral_entropy());

  Distribution<Subset> cond = conditional_nonempty(spec);
  Code<Subset> code = huffman_build(cond, 2);
  std::printf("  Huffman code for the nonempty spectral sample:\n");
  for (const auto& [s, w] : code.words) std::printf("    mask %u -> %s\n", s, w.c_str());
  std::printf("  expected length %s bits (entropy %.6f)\n",
              expected_length(code, cond).get_str().c_str(), cond.entropy_bits());
  return 0;
}
