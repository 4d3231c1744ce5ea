#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

#include "kds/kernels.hpp"
#include "kds/points.hpp"

namespace kds {

// Parameter interval [t0,t1] of the segment a + t(b-a), t in [0,1], inside
// the closed ball (c, r). Empty if the segment misses the ball; tangential
// grazes (discriminant within tolerance of zero) count as misses, they
// contribute zero length anyway.
inline std::optional<std::pair<double, double>> segment_ball_interval(
    std::span<const double> a, std::span<const double> b, std::span<const double> c, double r) {
  double qa = 0.0, qb = 0.0, qc = -r * r;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dir = b[i] - a[i];
    const double off = a[i] - c[i];
    qa += dir * dir;
    qb += 2.0 * off * dir;
    qc += off * off;
  }
  if (qa <= 1e-24) {  // degenerate segment: a point
    if (qc <= 0.0) return std::make_pair(0.0, 1.0);
    return std::nullopt;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 1e-12 * std::max(1.0, qa)) return std::nullopt;
  const double sq = std::sqrt(disc);
  double t0 = (-qb - sq) / (2.0 * qa);
  double t1 = (-qb + sq) / (2.0 * qa);
  t0 = std::max(t0, 0.0);
  t1 = std::min(t1, 1.0);
  if (t0 >= t1) return std::nullopt;
  return std::make_pair(t0, t1);
}

namespace detail {

inline double point_at(std::span<const double> a, std::span<const double> b, double t, std::size_t i) {
  return a[i] + t * (b[i] - a[i]);
}

inline double dist_to_center(std::span<const double> a, std::span<const double> b,
                             std::span<const double> c, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = point_at(a, b, t, i) - c[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

// Length of segment ∩ closed ball. Reduces to the obvious cases: full length
// when both endpoints are inside, endpoint-to-boundary when one is, chord
// length when the segment crosses the ball from outside.
inline double segment_length_in_ball(std::span<const double> a, std::span<const double> b,
                                     std::span<const double> c, double r) {
  auto iv = segment_ball_interval(a, b, c, r);
  if (!iv) return 0.0;
  return (iv->second - iv->first) * distance(a, b);
}

// Distance between the two extreme points (by distance to the annulus
// center) of segment ∩ annulus. When the near distance is attained at
// several points, the one closest to the chosen far point wins.
inline double segment_extent_in_annulus(std::span<const double> a, std::span<const double> b,
                                        std::span<const double> c, double r_in, double r_out) {
  auto outer = segment_ball_interval(a, b, c, r_out);
  if (!outer) return 0.0;
  const auto [lo, hi] = *outer;

  // Candidate parameters where distance-to-center extremes can occur:
  // interval ends, hole boundary crossings, and the projection foot.
  double cand[6];
  int ncand = 0;
  cand[ncand++] = lo;
  cand[ncand++] = hi;
  if (r_in > 0.0) {
    if (auto inner = segment_ball_interval(a, b, c, r_in)) {
      cand[ncand++] = std::clamp(inner->first, lo, hi);
      cand[ncand++] = std::clamp(inner->second, lo, hi);
    }
  }
  {
    double qa = 0.0, qb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double dir = b[i] - a[i];
      qa += dir * dir;
      qb += (a[i] - c[i]) * dir;
    }
    if (qa > 0.0) cand[ncand++] = std::clamp(-qb / qa, lo, hi);
  }

  const double tol = 1e-12 * std::max(1.0, r_out);
  auto in_annulus = [&](double t) {
    const double d = detail::dist_to_center(a, b, c, t);
    return d >= r_in - tol && d <= r_out + tol;
  };

  // Far point: maximum distance over candidates lying in the annulus.
  double t_far = 0.0, d_far = -1.0;
  for (int i = 0; i < ncand; ++i) {
    if (!in_annulus(cand[i])) continue;
    const double d = detail::dist_to_center(a, b, c, cand[i]);
    if (d > d_far) {
      d_far = d;
      t_far = cand[i];
    }
  }
  if (d_far < 0.0) return 0.0;

  // Near point: minimum distance; ties resolved toward the far point.
  double t_near = t_far, d_near = d_far;
  for (int i = 0; i < ncand; ++i) {
    if (!in_annulus(cand[i])) continue;
    const double d = detail::dist_to_center(a, b, c, cand[i]);
    if (d < d_near - tol ||
        (d < d_near + tol && std::abs(cand[i] - t_far) < std::abs(t_near - t_far))) {
      d_near = std::min(d, d_near);
      t_near = cand[i];
    }
  }
  return std::abs(t_far - t_near) * distance(a, b);
}

}  // namespace kds
