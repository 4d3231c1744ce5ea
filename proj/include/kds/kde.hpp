#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kds/kernels.hpp"
#include "kds/net.hpp"
#include "kds/parallel.hpp"
#include "kds/points.hpp"

namespace kds {

// Kernel density estimate of a point set: kde(x) = sum_p K(x,p) / |P|.
struct KdeQuery {
  const PointSet* base = nullptr;
  KernelSpec kernel;

  KdeQuery(const PointSet& ps, const KernelSpec& k) : base(&ps), kernel(k) {
    if (ps.empty()) throw std::invalid_argument("KdeQuery: empty base set");
    if (ps.dim() != k.dim) throw std::invalid_argument("KdeQuery: dimension mismatch");
  }
};

inline double kde_value(const KdeQuery& q, std::span<const double> x) {
  if (static_cast<int>(x.size()) != q.base->dim())
    throw std::invalid_argument("kde_value: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < q.base->size(); ++i) {
    s += q.kernel.eval_at_sq_distance(squared_distance(x, (*q.base)[i]));
  }
  return s / static_cast<double>(q.base->size());
}

struct LinfReport {
  double value = 0.0;  // grid maximum of |kde1 - kde2|
  Point argmax;
  double grid_tau = 0.0;
  double slack = 0.0;      // 2 * sigma * tau: certified sup is in [value, value + slack]
  bool certified = false;  // false for ball kernels (no slope bound)
  std::size_t grid_size = 0;
};

// Evaluation grid over the union support region of `ps`. Slope-bounded
// kernels reuse the covering-net construction; ball kernels get a plain
// support-restricted lattice with no covering certificate.
inline EvaluationNet build_linf_grid(const PointSet& ps, const KernelSpec& kernel, double resolution,
                                     std::size_t max_centers = 10000000) {
  if (!(resolution > 0.0)) throw std::invalid_argument("linf grid: resolution must be positive");
  NetConfig cfg;
  cfg.tau = resolution * std::sqrt(static_cast<double>(ps.dim()));
  cfg.max_centers = max_centers;
  if (kernel.family != KernelFamily::ball) return build_evaluation_net(ps, kernel, cfg);

  EvaluationNet net;
  const int d = ps.dim();
  net.dim = d;
  net.spacing = resolution;
  net.tau = cfg.tau;
  net.region_radius = kernel.support_radius(0.0);
  const double r = net.region_radius;
  const double r2 = r * r;
  std::vector<double> lo, hi;
  ps.bounds(lo, hi);
  std::vector<std::int64_t> ilo(d), ihi(d), it(d);
  for (int c = 0; c < d; ++c) {
    ilo[c] = static_cast<std::int64_t>(std::ceil((lo[c] - r) / resolution));
    ihi[c] = static_cast<std::int64_t>(std::floor((hi[c] + r) / resolution));
    it[c] = ilo[c];
  }
  std::vector<double> node(d);
  for (;;) {
    for (int c = 0; c < d; ++c) node[c] = static_cast<double>(it[c]) * resolution;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (squared_distance(node, ps[i]) <= r2) {
        net.centers.insert(net.centers.end(), node.begin(), node.end());
        break;
      }
    }
    int c = d - 1;
    while (c >= 0 && ++it[c] > ihi[c]) it[c--] = ilo[c];
    if (c < 0) break;
  }
  return net;
}

namespace detail {

inline std::vector<double> grid_kde(const EvaluationNet& net, const PointSet& ps,
                                    const KernelSpec& kernel) {
  std::vector<double> out(net.size());
  const double inv = 1.0 / static_cast<double>(ps.size());
  parallel_chunks(net.size(), [&](std::size_t b, std::size_t e, int) {
    for (std::size_t c = b; c < e; ++c) {
      const auto x = net[c];
      double s = 0.0;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        s += kernel.eval_at_sq_distance(squared_distance(x, ps[i]));
      }
      out[c] = s * inv;
    }
  });
  return out;
}

inline LinfReport max_abs_diff(const EvaluationNet& net, const KernelSpec& kernel,
                               std::span<const double> a, std::span<const double> b) {
  const int workers = thread_count();
  std::vector<double> best(workers, -1.0);
  std::vector<std::size_t> arg(workers, 0);
  parallel_chunks(net.size(), [&](std::size_t lo, std::size_t hi, int w) {
    for (std::size_t c = lo; c < hi; ++c) {
      const double v = std::abs(a[c] - b[c]);
      if (v > best[w]) {
        best[w] = v;
        arg[w] = c;
      }
    }
  });
  double bv = -1.0;
  std::size_t bi = 0;
  for (int w = 0; w < workers; ++w) {
    if (best[w] > bv || (best[w] == bv && arg[w] < bi)) {
      bv = best[w];
      bi = arg[w];
    }
  }
  LinfReport r;
  r.value = bv;
  r.argmax = Point(net[bi]);
  r.grid_tau = net.tau;
  r.certified = kernel.family != KernelFamily::ball;
  r.slack = r.certified ? 2.0 * kernel.slope_bound() * net.tau : 0.0;
  r.grid_size = net.size();
  return r;
}

}  // namespace detail

// Grid evaluator with the base KDE cached, so many candidate subsets can be
// measured against one ground set cheaply.
class LinfGridEvaluator {
 public:
  LinfGridEvaluator(const PointSet& base, const KernelSpec& kernel, double resolution,
                    std::size_t max_centers = 10000000)
      : kernel_(kernel), net_(build_linf_grid(base, kernel, resolution, max_centers)) {
    if (net_.size() == 0) throw std::invalid_argument("linf grid: empty evaluation grid");
    base_values_ = detail::grid_kde(net_, base, kernel_);
  }

  const EvaluationNet& net() const { return net_; }

  LinfReport distance_to(const PointSet& other) const {
    if (other.empty()) throw std::invalid_argument("linf distance: empty point set");
    if (other.dim() != net_.dim) throw std::invalid_argument("linf distance: dimension mismatch");
    const std::vector<double> ov = detail::grid_kde(net_, other, kernel_);
    return detail::max_abs_diff(net_, kernel_, base_values_, ov);
  }

 private:
  KernelSpec kernel_;
  EvaluationNet net_;
  std::vector<double> base_values_;
};

// Certified L_inf distance between two KDEs over the union of their support
// regions. `resolution` is the grid spacing; for slope-bounded kernels the
// true supremum lies in [value, value + slack].
inline LinfReport linf_distance(const KdeQuery& q1, const KdeQuery& q2, double resolution,
                                std::size_t max_centers = 10000000) {
  if (q1.kernel.family != q2.kernel.family || q1.kernel.dim != q2.kernel.dim ||
      q1.kernel.bandwidth != q2.kernel.bandwidth || q1.kernel.norm != q2.kernel.norm)
    throw std::invalid_argument("linf_distance: kernel mismatch");
  PointSet both(q1.base->dim());
  for (std::size_t i = 0; i < q1.base->size(); ++i) both.push_back((*q1.base)[i]);
  for (std::size_t i = 0; i < q2.base->size(); ++i) both.push_back((*q2.base)[i]);
  const EvaluationNet net = build_linf_grid(both, q1.kernel, resolution, max_centers);
  if (net.size() == 0) throw std::invalid_argument("linf_distance: empty evaluation grid");
  const std::vector<double> a = detail::grid_kde(net, *q1.base, q1.kernel);
  const std::vector<double> b = detail::grid_kde(net, *q2.base, q2.kernel);
  return detail::max_abs_diff(net, q1.kernel, a, b);
}

}  // namespace kds
