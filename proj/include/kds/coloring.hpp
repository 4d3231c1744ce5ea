#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kds/matching.hpp"
#include "kds/rng.hpp"

namespace kds {

// Signs in {-1,+1} per point index. Matched pairs always carry opposite
// signs; an odd-n leftover is +1.
struct Coloring {
  std::vector<int> signs;
  std::uint64_t seed = 0;
  std::uint64_t matching_id = 0;  // 0 for colorings not derived from a matching

  int operator[](std::size_t i) const { return signs[i]; }
  std::size_t size() const { return signs.size(); }
};

// One independent fair coin per matched pair decides which endpoint gets +1.
inline Coloring color_from_matching(const Matching& m, std::size_t n, std::uint64_t seed) {
  Coloring chi;
  chi.signs.assign(n, 0);
  chi.seed = seed;
  chi.matching_id = m.id();
  Rng rng = Rng(seed).stream("pair-signs");
  for (auto [i, j] : m.pairs) {
    const int s = rng.next_sign();
    chi.signs[i] = s;
    chi.signs[j] = -s;
  }
  if (m.leftover) chi.signs[*m.leftover] = 1;
  for (int s : chi.signs) {
    if (s == 0) throw std::logic_error("color_from_matching: matching does not cover the set");
  }
  return chi;
}

// Baseline: independent fair sign per point, no pairing structure.
inline Coloring random_coloring(std::size_t n, std::uint64_t seed) {
  Coloring chi;
  chi.signs.resize(n);
  chi.seed = seed;
  Rng rng = Rng(seed).stream("iid-signs");
  for (std::size_t i = 0; i < n; ++i) chi.signs[i] = rng.next_sign();
  return chi;
}

}  // namespace kds
