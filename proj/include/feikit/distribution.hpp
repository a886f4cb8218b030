#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "feikit/errors.hpp"

namespace feikit {

/// Finite probability distribution with exact rational masses.
/// Atoms are kept sorted by outcome and hold strictly positive mass.
template <typename Outcome>
struct Distribution {
  std::vector<std::pair<Outcome, mpq_class>> atoms;

  void sort_and_merge() {
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<Outcome, mpq_class>> out;
    for (auto& a : atoms) {
      if (a.second == 0) continue;
      if (!out.empty() && out.back().first == a.first)
        out.back().second += a.second;
      else
        out.push_back(a);
    }
    atoms = std::move(out);
  }

  mpq_class total() const {
    mpq_class t = 0;
    for (const auto& a : atoms) t += a.second;
    return t;
  }

  bool is_normalized() const { return total() == 1; }

  std::size_t support_size() const { return atoms.size(); }

  const mpq_class* mass(const Outcome& o) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), o,
                               [](const auto& a, const Outcome& k) { return a.first < k; });
    if (it == atoms.end() || !(it->first == o)) return nullptr;
    return &it->second;
  }

  /// Shannon entropy in bits; masses are exact, the logs are double.
  double entropy_bits() const {
    double h = 0.0;
    for (const auto& a : atoms) {
      double p = a.second.get_d();
      if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
  }

  bool operator==(const Distribution& o) const { return atoms == o.atoms; }
};

}  // namespace feikit
