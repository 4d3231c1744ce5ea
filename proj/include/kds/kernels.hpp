#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "kds/points.hpp"

namespace kds {

enum class KernelFamily { gaussian, triangle, epanechnikov, ball };

// Two bandwidth conventions: `integral` keeps the integral fixed,
// k_w(z) = (1/w^d) k(z/w); `peak` keeps k_w(0) = 1, k_w(z) = k(z/w).
// They coincide at w = 1.
enum class KernelNorm { integral, peak };

inline const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::triangle: return "triangle";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::ball: return "ball";
  }
  return "?";
}

namespace detail {

// Unit-scale profiles, k(0) = 1, non-increasing in the distance argument.
inline double base_profile(KernelFamily f, double u) {
  switch (f) {
    case KernelFamily::gaussian: return std::exp(-u * u);
    case KernelFamily::triangle: return std::max(0.0, 1.0 - u);
    case KernelFamily::epanechnikov: return std::max(0.0, 1.0 - u * u);
    case KernelFamily::ball: return u <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

inline double base_slope(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian:
      // max |d/du exp(-u^2)| = 2u exp(-u^2) at u = 1/sqrt(2)
      return std::sqrt(2.0 / std::numbers::e);
    case KernelFamily::triangle: return 1.0;
    case KernelFamily::epanechnikov: return 2.0;
    case KernelFamily::ball:
      throw std::domain_error("slope bound undefined for ball kernels (step discontinuity)");
  }
  return 0.0;
}

// Largest u with k(u) > t for the unit-scale profile (t in [0, 1)).
// t = 0 means the closure of the support; rejected for gaussian.
inline double base_support_radius(KernelFamily f, double t) {
  if (t >= 1.0) throw std::domain_error("support threshold at or above k(0): empty support");
  if (t < 0.0) t = 0.0;
  switch (f) {
    case KernelFamily::gaussian:
      if (t <= 0.0) throw std::domain_error("gaussian support is unbounded at threshold 0");
      return std::sqrt(-std::log(t));
    case KernelFamily::triangle: return 1.0 - t;
    case KernelFamily::epanechnikov: return std::sqrt(1.0 - t);
    case KernelFamily::ball: return 1.0;
  }
  return 0.0;
}

}  // namespace detail

// d-dimensional volume of a radius-r ball: pi^{d/2} / Gamma(d/2+1) * r^d.
inline double ball_volume(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("ball_volume: dim must be >= 1");
  if (radius < 0.0) throw std::invalid_argument("ball_volume: radius must be >= 0");
  const double half = 0.5 * static_cast<double>(dim);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) * std::pow(radius, dim);
}

// A shift/rotation-invariant kernel: K(x,p) = k_w(||x-p||).
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  int dim = 2;
  double bandwidth = 1.0;
  KernelNorm norm = KernelNorm::integral;

  KernelSpec() = default;
  KernelSpec(KernelFamily f, int d, double w = 1.0, KernelNorm nm = KernelNorm::integral)
      : family(f), dim(d), bandwidth(w), norm(nm) {
    if (d < 1) throw std::invalid_argument("KernelSpec: dim must be >= 1");
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("KernelSpec: bandwidth must be positive");
  }

  double amplitude() const {
    return norm == KernelNorm::integral ? std::pow(bandwidth, -dim) : 1.0;
  }

  // k_w(0)
  double peak() const { return amplitude(); }

  double eval_at_distance(double z) const {
    return amplitude() * detail::base_profile(family, z / bandwidth);
  }

  double eval(std::span<const double> x, std::span<const double> p) const {
    if (x.size() != p.size() || static_cast<int>(x.size()) != dim)
      throw std::invalid_argument("kernel eval: dimension mismatch");
    return eval_at_distance(distance(x, p));
  }

  // Squared-distance form for hot loops (skips the sqrt except for the
  // triangle profile, which needs the actual distance).
  double eval_at_sq_distance(double z2) const {
    const double w2 = bandwidth * bandwidth;
    switch (family) {
      case KernelFamily::gaussian: return amplitude() * std::exp(-z2 / w2);
      case KernelFamily::triangle: return amplitude() * std::max(0.0, 1.0 - std::sqrt(z2) / bandwidth);
      case KernelFamily::epanechnikov: return amplitude() * std::max(0.0, 1.0 - z2 / w2);
      case KernelFamily::ball: return z2 <= w2 ? amplitude() : 0.0;
    }
    return 0.0;
  }

  bool compact_support() const { return family != KernelFamily::gaussian; }

  // sigma with |k_w(a) - k_w(b)| <= sigma |a - b| for all distances a, b.
  double slope_bound() const {
    const double s = detail::base_slope(family);
    return norm == KernelNorm::integral ? s * std::pow(bandwidth, -(dim + 1)) : s / bandwidth;
  }

  // Radius of {p : K(x,p) > threshold}. threshold must be < k_w(0);
  // 0 is accepted for compact-support families (support closure).
  double support_radius(double threshold) const {
    const double rel = threshold / amplitude();
    return bandwidth * detail::base_support_radius(family, rel);
  }
};

struct Ball {
  Point center;
  double radius = 0.0;
};

struct Annulus {
  Point center;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
};

inline Ball support_ball(const KernelSpec& k, const Point& x, double threshold) {
  if (x.dim() != k.dim) throw std::invalid_argument("support_ball: dimension mismatch");
  return Ball{x, k.support_radius(threshold)};
}

// Kernel spec strings: "gaussian", "triangle:w=0.5", "ball:w=2:norm=peak".
inline KernelSpec parse_kernel(const std::string& text, int dim) {
  std::string rest = text;
  auto take = [&rest]() -> std::string {
    auto pos = rest.find(':');
    std::string head = rest.substr(0, pos);
    rest = pos == std::string::npos ? std::string() : rest.substr(pos + 1);
    return head;
  };
  const std::string name = take();
  KernelFamily fam;
  if (name == "gaussian") fam = KernelFamily::gaussian;
  else if (name == "triangle") fam = KernelFamily::triangle;
  else if (name == "epanechnikov") fam = KernelFamily::epanechnikov;
  else if (name == "ball") fam = KernelFamily::ball;
  else throw std::invalid_argument("unknown kernel family: " + name);

  double w = 1.0;
  KernelNorm nm = KernelNorm::integral;
  while (!rest.empty()) {
    const std::string kv = take();
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad kernel option: " + kv);
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "w") {
      w = std::stod(val);
    } else if (key == "norm") {
      if (val == "integral") nm = KernelNorm::integral;
      else if (val == "peak") nm = KernelNorm::peak;
      else throw std::invalid_argument("bad kernel norm: " + val);
    } else {
      throw std::invalid_argument("unknown kernel option: " + key);
    }
  }
  return KernelSpec(fam, dim, w, nm);
}

inline std::string format_kernel(const KernelSpec& k) {
  std::string s = family_name(k.family);
  char buf[64];
  std::snprintf(buf, sizeof buf, ":w=%.17g", k.bandwidth);
  s += buf;
  if (k.norm == KernelNorm::peak) s += ":norm=peak";
  return s;
}

}  // namespace kds
