#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "kds/kernels.hpp"
#include "kds/points.hpp"

namespace kds {

// Finite set of candidate kernel centers covering the union U of the
// support balls around the data points: every x in U lies within
// `tau` of some center. Centers sit on an absolute lattice (anchored at
// the origin) of the given spacing, kept only where they fall inside U.
struct EvaluationNet {
  int dim = 0;
  double spacing = 0.0;        // lattice step
  double tau = 0.0;            // covering radius of U by the centers
  double region_radius = 0.0;  // per-point support/threshold radius
  bool truncated = false;      // capped below the requested resolution
  std::vector<double> centers;  // flat, row-major

  std::size_t size() const { return dim == 0 ? 0 : centers.size() / dim; }
  std::span<const double> operator[](std::size_t i) const {
    return {centers.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

struct NetConfig {
  double tau = 0.0;                     // 0 = auto: 1 / (n * max(sigma, 1))
  std::size_t max_centers = 10000000;   // coarsen beyond this, flag truncated
};

// Covering net of U = union of support balls. The support threshold is 0
// for compact kernels (exact support) and 1/(2n) for the Gaussian, where
// mass outside contributes at most 1/2 to any kernel sum. Requires a
// slope-bounded kernel; ball kernels have no slope bound.
inline EvaluationNet build_evaluation_net(const PointSet& ps, const KernelSpec& kernel,
                                          const NetConfig& cfg = {}) {
  if (ps.empty()) throw std::invalid_argument("build_evaluation_net: empty point set");
  if (ps.dim() != kernel.dim) throw std::invalid_argument("build_evaluation_net: dimension mismatch");
  const double sigma = kernel.slope_bound();  // throws for ball kernels
  const int d = ps.dim();
  const std::size_t n = ps.size();

  EvaluationNet net;
  net.dim = d;
  const double tau_target = cfg.tau > 0.0 ? cfg.tau : 1.0 / (static_cast<double>(n) * std::max(sigma, 1.0));
  const double threshold = kernel.compact_support() ? 0.0 : 1.0 / (2.0 * static_cast<double>(n));
  const double r = kernel.support_radius(threshold);
  net.region_radius = r;

  double h = tau_target / std::sqrt(static_cast<double>(d));
  std::vector<double> lo, hi;
  ps.bounds(lo, hi);
  auto estimate = [&](double step) {
    double count = 1.0;
    for (int c = 0; c < d; ++c) count *= (hi[c] - lo[c] + 2.0 * r) / step + 1.0;
    return count;
  };
  if (estimate(h) > static_cast<double>(cfg.max_centers)) {
    h *= std::pow(estimate(h) / static_cast<double>(cfg.max_centers), 1.0 / d);
    // Nudge until the lattice actually fits the cap.
    while (estimate(h) > static_cast<double>(cfg.max_centers)) h *= 1.05;
    net.truncated = true;
  }
  net.spacing = h;
  net.tau = h * std::sqrt(static_cast<double>(d));

  // Bucket points on a coarse grid so the inclusion test only looks at
  // nearby buckets.
  const double cell = std::max(r, h);
  std::vector<std::int64_t> cell_lo(d);
  std::vector<std::int64_t> cell_n(d);
  for (int c = 0; c < d; ++c) {
    cell_lo[c] = static_cast<std::int64_t>(std::floor((lo[c] - r) / cell));
    cell_n[c] = static_cast<std::int64_t>(std::floor((hi[c] + r) / cell)) - cell_lo[c] + 1;
  }
  double bucket_count = 1.0;
  for (int c = 0; c < d; ++c) bucket_count *= static_cast<double>(cell_n[c]);
  std::vector<std::vector<std::uint32_t>> buckets;
  const bool use_buckets = bucket_count <= 4e6;
  auto bucket_of = [&](std::span<const double> p) {
    std::size_t idx = 0;
    for (int c = 0; c < d; ++c) {
      const std::int64_t b = static_cast<std::int64_t>(std::floor(p[c] / cell)) - cell_lo[c];
      idx = idx * static_cast<std::size_t>(cell_n[c]) +
            static_cast<std::size_t>(std::clamp<std::int64_t>(b, 0, cell_n[c] - 1));
    }
    return idx;
  };
  if (use_buckets) {
    buckets.resize(static_cast<std::size_t>(bucket_count));
    for (std::size_t i = 0; i < n; ++i) buckets[bucket_of(ps[i])].push_back(static_cast<std::uint32_t>(i));
  }

  const double r2 = r * r;
  std::vector<double> node(d);
  std::vector<std::int64_t> idx_lo(d), idx_hi(d), it(d);
  for (int c = 0; c < d; ++c) {
    idx_lo[c] = static_cast<std::int64_t>(std::ceil((lo[c] - r) / h));
    idx_hi[c] = static_cast<std::int64_t>(std::floor((hi[c] + r) / h));
    it[c] = idx_lo[c];
  }

  // cell >= r, so points within r of x live in the 3^d bucket neighborhood.
  std::vector<std::int64_t> bc(d), bi(d);
  auto covered = [&](std::span<const double> x) {
    if (!use_buckets) {
      for (std::size_t i = 0; i < n; ++i) {
        if (squared_distance(x, ps[i]) <= r2) return true;
      }
      return false;
    }
    for (int c = 0; c < d; ++c) {
      bc[c] = static_cast<std::int64_t>(std::floor(x[c] / cell)) - cell_lo[c];
      bi[c] = -1;
    }
    for (;;) {
      std::size_t idx = 0;
      bool valid = true;
      for (int c = 0; c < d; ++c) {
        const std::int64_t b = bc[c] + bi[c];
        if (b < 0 || b >= cell_n[c]) {
          valid = false;
          break;
        }
        idx = idx * static_cast<std::size_t>(cell_n[c]) + static_cast<std::size_t>(b);
      }
      if (valid) {
        for (std::uint32_t pi : buckets[idx]) {
          if (squared_distance(x, ps[pi]) <= r2) return true;
        }
      }
      int c = d - 1;
      while (c >= 0 && ++bi[c] > 1) bi[c--] = -1;
      if (c < 0) return false;
    }
  };

  for (;;) {
    for (int c = 0; c < d; ++c) node[c] = static_cast<double>(it[c]) * h;
    if (covered(node)) {
      net.centers.insert(net.centers.end(), node.begin(), node.end());
    }
    int c = d - 1;
    while (c >= 0 && ++it[c] > idx_hi[c]) it[c--] = idx_lo[c];
    if (c < 0) break;
  }
  return net;
}

}  // namespace kds
