#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kds/blossom.hpp"
#include "kds/geometry.hpp"
#include "kds/points.hpp"
#include "kds/rng.hpp"

namespace kds {

// Perfect matching of a point set as index pairs; odd-sized inputs carry a
// single leftover index that belongs to no pair.
struct Matching {
  std::vector<std::pair<int, int>> pairs;  // each (i,j) with i < j, list sorted
  double cost = 0.0;
  std::optional<int> leftover;

  std::uint64_t id() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mixin = [&h](std::uint64_t x) {
      h ^= x;
      h *= 0x100000001b3ULL;
    };
    for (auto [i, j] : pairs) {
      mixin(static_cast<std::uint64_t>(i));
      mixin(static_cast<std::uint64_t>(j));
    }
    mixin(leftover ? static_cast<std::uint64_t>(*leftover) + 1 : 0);
    return h;
  }
};

namespace detail {

inline void normalize(Matching& m, const PointSet& ps) {
  for (auto& pr : m.pairs) {
    if (pr.first > pr.second) std::swap(pr.first, pr.second);
  }
  std::sort(m.pairs.begin(), m.pairs.end());
  double c = 0.0;
  for (auto [i, j] : m.pairs) c += distance(ps[i], ps[j]);
  m.cost = c;
}

inline void check_perfect(const Matching& m, std::size_t n) {
  std::vector<char> seen(n, 0);
  for (auto [i, j] : m.pairs) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n || i == j)
      throw std::logic_error("matching: bad pair index");
    if (seen[i]++ || seen[j]++) throw std::logic_error("matching: index covered twice");
  }
  if (m.leftover) {
    if (static_cast<std::size_t>(*m.leftover) >= n) throw std::logic_error("matching: bad leftover");
    if (seen[*m.leftover]++) throw std::logic_error("matching: leftover also matched");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) throw std::logic_error("matching: index not covered");
  }
}

// Odd-n rule: set aside the point with the largest nearest-neighbor
// distance (smallest index on ties); it is kept with color +1 downstream.
inline int pick_leftover(const PointSet& ps) {
  const std::size_t n = ps.size();
  int best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double nn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) nn = std::min(nn, squared_distance(ps[i], ps[j]));
    }
    if (nn > best_d) {
      best_d = nn;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace detail

// Exhaustive minimum over all (n-1)!! perfect matchings. Testing oracle;
// ties broken toward the lexicographically smallest sorted pair list.
inline Matching min_cost_matching_bruteforce(const PointSet& ps) {
  const std::size_t n = ps.size();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("bruteforce matching: n must be even and >= 2");
  if (n > 12) throw std::invalid_argument("bruteforce matching: n must be <= 12");

  std::vector<std::pair<int, int>> current, best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<char> used(n, 0);

  auto rec = [&](auto&& self, double acc) -> void {
    std::size_t i = 0;
    while (i < n && used[i]) ++i;
    if (i == n) {
      if (acc < best_cost - 1e-12 ||
          (acc < best_cost + 1e-12 && (best.empty() || current < best))) {
        best_cost = std::min(acc, best_cost);
        best = current;
      }
      return;
    }
    used[i] = 1;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current.emplace_back(static_cast<int>(i), static_cast<int>(j));
      self(self, acc + distance(ps[i], ps[j]));
      current.pop_back();
      used[j] = 0;
    }
    used[i] = 0;
  };
  rec(rec, 0.0);

  Matching m;
  m.pairs = best;
  detail::normalize(m, ps);
  detail::check_perfect(m, n);
  return m;
}

// Exact min-cost perfect matching via the O(n^3) blossom solver on negated
// distances. Deterministic; equal-cost optima resolve to whichever the
// solver's fixed scan order reaches (the brute-force oracle is the one that
// canonicalizes ties).
inline Matching min_cost_matching_exact(const PointSet& ps) {
  const std::size_t n = ps.size();
  if (n < 2) throw std::invalid_argument("exact matching: need at least 2 points");

  std::optional<int> leftover;
  std::vector<int> live;  // live[i] = original index of reduced vertex i
  live.reserve(n);
  if (n % 2 != 0) leftover = detail::pick_leftover(ps);
  for (std::size_t i = 0; i < n; ++i) {
    if (!leftover || static_cast<int>(i) != *leftover) live.push_back(static_cast<int>(i));
  }
  const int m = static_cast<int>(live.size());

  Matching out;
  out.leftover = leftover;

  // Cache the distance matrix when affordable; fall back to on-the-fly
  // distances for very large inputs.
  constexpr int kCacheLimit = 4608;
  std::vector<int> partner;
  if (m <= kCacheLimit) {
    std::vector<double> dist(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double d = distance(ps[live[i]], ps[live[j]]);
        dist[static_cast<std::size_t>(i) * m + j] = d;
        dist[static_cast<std::size_t>(j) * m + i] = d;
      }
    }
    auto wt = [&dist, m](int i, int j) -> double {
      return -dist[static_cast<std::size_t>(i) * m + j];
    };
    partner = detail::DenseBlossom<decltype(wt)>(m, wt).solve();
  } else {
    auto wt = [&ps, &live](int i, int j) -> double { return -distance(ps[live[i]], ps[live[j]]); };
    partner = detail::DenseBlossom<decltype(wt)>(m, wt).solve();
  }

  for (int i = 0; i < m; ++i) {
    if (partner[i] > i) out.pairs.emplace_back(live[i], live[partner[i]]);
  }
  detail::normalize(out, ps);
  detail::check_perfect(out, n);
  return out;
}

// Repeated globally-nearest-available-pair selection. Fast fallback for
// large n; cost is never below the exact optimum.
inline Matching min_cost_matching_greedy(const PointSet& ps) {
  const std::size_t n = ps.size();
  if (n < 2) throw std::invalid_argument("greedy matching: need at least 2 points");

  Matching out;
  std::vector<char> used(n, 0);
  std::size_t remaining = n;
  if (n % 2 != 0) {
    const int lo = detail::pick_leftover(ps);
    out.leftover = lo;
    used[lo] = 1;
    --remaining;
  }

  // Lazy nearest-neighbor heap: entries go stale when partners get matched
  // and are recomputed on pop.
  struct Cand {
    double d2;
    int i, j;
    bool operator>(const Cand& o) const { return d2 > o.d2; }
  };
  std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> heap;
  auto nearest = [&](int i) -> Cand {
    double bd = std::numeric_limits<double>::infinity();
    int bj = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || static_cast<int>(j) == i) continue;
      const double d2 = squared_distance(ps[i], ps[j]);
      if (d2 < bd) {
        bd = d2;
        bj = static_cast<int>(j);
      }
    }
    return {bd, i, bj};
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!used[i]) heap.push(nearest(static_cast<int>(i)));
  }
  while (remaining > 0) {
    Cand c = heap.top();
    heap.pop();
    if (used[c.i]) continue;
    if (c.j < 0 || used[c.j]) {
      heap.push(nearest(c.i));
      continue;
    }
    used[c.i] = used[c.j] = 1;
    out.pairs.emplace_back(c.i, c.j);
    remaining -= 2;
  }
  detail::normalize(out, ps);
  detail::check_perfect(out, n);
  return out;
}

// Sum over matching edges of the d-th power of the edge length clipped to
// the ball, d the ambient dimension.
inline double matching_length_in_ball(const Ball& ball, const Matching& m, const PointSet& ps) {
  if (ball.center.dim() != ps.dim()) throw std::invalid_argument("matching_length_in_ball: dimension mismatch");
  const int d = ps.dim();
  double total = 0.0;
  for (auto [i, j] : m.pairs) {
    const double len = segment_length_in_ball(ps[i], ps[j], ball.center.view(), ball.radius);
    if (len > 0.0) total += std::pow(len, d);
  }
  return total;
}

// Per edge: d-th power of the distance between the extreme points of the
// segment's intersection with the annulus.
inline double matching_length_in_annulus(const Annulus& a, const Matching& m, const PointSet& ps) {
  if (a.center.dim() != ps.dim()) throw std::invalid_argument("matching_length_in_annulus: dimension mismatch");
  if (!(a.outer_radius > a.inner_radius) || a.inner_radius < 0.0)
    throw std::invalid_argument("matching_length_in_annulus: bad radii");
  const int d = ps.dim();
  double total = 0.0;
  for (auto [i, j] : m.pairs) {
    const double len =
        segment_extent_in_annulus(ps[i], ps[j], a.center.view(), a.inner_radius, a.outer_radius);
    if (len > 0.0) total += std::pow(len, d);
  }
  return total;
}

}  // namespace kds
