#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kds/coloring.hpp"
#include "kds/kernels.hpp"
#include "kds/matching.hpp"
#include "kds/net.hpp"
#include "kds/parallel.hpp"
#include "kds/points.hpp"

namespace kds {

// |sum_p chi(p) K(x,p)|
inline double discrepancy_at(const PointSet& ps, const Coloring& chi, const KernelSpec& k,
                             std::span<const double> x) {
  if (static_cast<int>(x.size()) != ps.dim() || ps.dim() != k.dim)
    throw std::invalid_argument("discrepancy_at: dimension mismatch");
  if (chi.size() != ps.size()) throw std::invalid_argument("discrepancy_at: coloring size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    s += chi[i] * k.eval_at_sq_distance(squared_distance(x, ps[i]));
  }
  return std::abs(s);
}

struct DiscrepancyReport {
  double max_disc = 0.0;
  Point argmax_center;
  std::size_t center_count = 0;
  double net_tau = 0.0;
  double additive_slack = 0.0;  // tau * n * sigma: grid max is within this of sup over U
  std::optional<std::vector<double>> per_center;
  // Filled by annotate_chernoff when a matching is available.
  std::optional<double> sum_delta_sq;
  std::optional<double> chernoff_at_max;
};

// Maximum of discrepancy_at over the net for several colorings at once;
// sharing the kernel evaluations across colorings is what makes paired
// matching-vs-random comparisons affordable.
inline std::vector<DiscrepancyReport> max_discrepancy_multi(const PointSet& ps,
                                                            std::span<const Coloring> colorings,
                                                            const KernelSpec& k,
                                                            const EvaluationNet& net,
                                                            bool keep_per_center = false) {
  if (net.size() == 0) throw std::invalid_argument("max_discrepancy: empty net");
  if (net.dim != ps.dim() || ps.dim() != k.dim)
    throw std::invalid_argument("max_discrepancy: dimension mismatch");
  const std::size_t n = ps.size();
  const std::size_t nc = colorings.size();
  for (const Coloring& chi : colorings) {
    if (chi.size() != n) throw std::invalid_argument("max_discrepancy: coloring size mismatch");
  }
  const std::size_t m = net.size();
  const int workers = thread_count();

  std::vector<std::vector<double>> best(workers, std::vector<double>(nc, -1.0));
  std::vector<std::vector<std::size_t>> arg(workers, std::vector<std::size_t>(nc, 0));
  std::vector<std::vector<double>> per_center(keep_per_center ? nc : 0);
  for (auto& pc : per_center) pc.assign(m, 0.0);

  std::vector<std::vector<double>> accs(workers, std::vector<double>(nc));
  parallel_chunks(m, [&](std::size_t b, std::size_t e, int w) {
    auto& acc = accs[w];
    for (std::size_t ci = b; ci < e; ++ci) {
      const auto x = net[ci];
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double kv = k.eval_at_sq_distance(squared_distance(x, ps[i]));
        for (std::size_t j = 0; j < nc; ++j) acc[j] += colorings[j][i] * kv;
      }
      for (std::size_t j = 0; j < nc; ++j) {
        const double v = std::abs(acc[j]);
        if (keep_per_center) per_center[j][ci] = v;
        if (v > best[w][j]) {
          best[w][j] = v;
          arg[w][j] = ci;
        }
      }
    }
  });

  const double sigma = k.slope_bound();
  std::vector<DiscrepancyReport> reports(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    double bv = -1.0;
    std::size_t bi = 0;
    for (int w = 0; w < workers; ++w) {
      if (best[w][j] > bv || (best[w][j] == bv && arg[w][j] < bi)) {
        bv = best[w][j];
        bi = arg[w][j];
      }
    }
    DiscrepancyReport& r = reports[j];
    r.max_disc = bv;
    r.argmax_center = Point(net[bi]);
    r.center_count = m;
    r.net_tau = net.tau;
    r.additive_slack = net.tau * static_cast<double>(n) * sigma;
    if (keep_per_center) r.per_center = std::move(per_center[j]);
  }
  return reports;
}

inline DiscrepancyReport max_discrepancy(const PointSet& ps, const Coloring& chi, const KernelSpec& k,
                                         const EvaluationNet& net, bool keep_per_center = false) {
  return max_discrepancy_multi(ps, std::span<const Coloring>(&chi, 1), k, net, keep_per_center)[0];
}

struct ChernoffBound {
  double bound = 0.0;
  double sum_delta_sq = 0.0;
};

// Two-sided tail bound 2 exp(-2 a^2 / sum_j Delta_j^2) for the signed pair
// sums at a fixed center, Delta_j = 2|K(x,p_j) - K(x,q_j)|. A zero
// denominator means every pair cancels exactly, so the tail is 0.
inline ChernoffBound chernoff_tail_bound(const PointSet& ps, const Matching& m, const KernelSpec& k,
                                         std::span<const double> x, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("chernoff_tail_bound: alpha must be positive");
  ChernoffBound out;
  for (auto [i, j] : m.pairs) {
    const double di = k.eval_at_sq_distance(squared_distance(x, ps[i]));
    const double dj = k.eval_at_sq_distance(squared_distance(x, ps[j]));
    const double delta = 2.0 * std::abs(di - dj);
    out.sum_delta_sq += delta * delta;
  }
  out.bound = out.sum_delta_sq <= 0.0 ? 0.0
                                      : 2.0 * std::exp(-2.0 * alpha * alpha / out.sum_delta_sq);
  return out;
}

inline void annotate_chernoff(DiscrepancyReport& r, const PointSet& ps, const Matching& m,
                              const KernelSpec& k) {
  const double alpha = std::max(r.max_disc, 1e-300);
  const ChernoffBound cb = chernoff_tail_bound(ps, m, k, r.argmax_center.view(), alpha);
  r.sum_delta_sq = cb.sum_delta_sq;
  r.chernoff_at_max = cb.bound;
}

// sum Delta^2 <= n^{1-2/d} (sum Delta^d)^{2/d}; input carries the d-th
// powers. Diagnostic companion to the matching-length bounds.
inline double jensen_sum_sq_bound(std::span<const double> deltas_pow_d, std::size_t n, int d) {
  if (d < 2) throw std::invalid_argument("jensen_sum_sq_bound: d must be >= 2");
  double s = 0.0;
  for (double v : deltas_pow_d) {
    if (v < 0.0) throw std::invalid_argument("jensen_sum_sq_bound: negative term");
    s += v;
  }
  return std::pow(static_cast<double>(n), 1.0 - 2.0 / d) * std::pow(s, 2.0 / d);
}

// Exact minimum over sign vectors of the net-restricted maximum
// discrepancy. Gray-code walk with running per-center sums; global sign
// symmetry halves the enumeration.
inline double min_discrepancy_bruteforce(const PointSet& ps, const KernelSpec& k,
                                         const EvaluationNet& net) {
  const std::size_t n = ps.size();
  if (n > 16) throw std::invalid_argument("min_discrepancy_bruteforce: n must be <= 16");
  if (n == 0) throw std::invalid_argument("min_discrepancy_bruteforce: empty point set");
  if (net.size() == 0) throw std::invalid_argument("min_discrepancy_bruteforce: empty net");
  const std::size_t m = net.size();
  if (m * n > 200000000ULL)
    throw std::invalid_argument("min_discrepancy_bruteforce: net too large");

  std::vector<double> kv(m * n);
  parallel_chunks(m, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t c = b; c < e; ++c) {
      const auto x = net[c];
      for (std::size_t i = 0; i < n; ++i) {
        kv[c * n + i] = k.eval_at_sq_distance(squared_distance(x, ps[i]));
      }
    }
  });

  // Start from all +1.
  std::vector<double> sums(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += kv[c * n + i];
    sums[c] = s;
  }
  std::vector<int> signs(n, 1);
  auto eval_max = [&] {
    double mx = 0.0;
    for (std::size_t c = 0; c < m; ++c) mx = std::max(mx, std::abs(sums[c]));
    return mx;
  };
  double best = eval_max();
  const std::uint64_t half = n == 1 ? 1 : (1ULL << (n - 1));
  for (std::uint64_t g = 1; g < half; ++g) {
    const int flip = std::countr_zero(g);
    signs[flip] = -signs[flip];
    const double scale = 2.0 * signs[flip];
    for (std::size_t c = 0; c < m; ++c) sums[c] += scale * kv[c * n + flip];
    best = std::min(best, eval_max());
  }
  return best;
}

}  // namespace kds
