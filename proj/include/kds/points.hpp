#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace kds {

// A single point in R^d. Owning type used at API boundaries (ball centers,
// argmax locations); hot loops work on spans into PointSet storage.
struct Point {
  std::vector<double> coords;

  Point() = default;
  Point(std::initializer_list<double> c) : coords(c) {}
  explicit Point(std::span<const double> c) : coords(c.begin(), c.end()) {}

  int dim() const { return static_cast<int>(coords.size()); }
  double operator[](std::size_t i) const { return coords[i]; }
  std::span<const double> view() const { return coords; }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

// Ordered list of points with a fixed dimension; indices 0..n-1 are the
// stable identifiers that matchings, colorings and samples refer to.
// Storage is flat row-major.
class PointSet {
 public:
  explicit PointSet(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("PointSet: dimension must be >= 1");
  }

  void push_back(std::span<const double> p) {
    if (static_cast<int>(p.size()) != dim_)
      throw std::invalid_argument("PointSet: point dimension mismatch");
    for (double c : p) {
      if (!std::isfinite(c)) throw std::invalid_argument("PointSet: coordinate not finite");
    }
    xs_.insert(xs_.end(), p.begin(), p.end());
  }

  void push_back(std::initializer_list<double> p) { push_back(std::span<const double>(p.begin(), p.size())); }

  std::span<const double> operator[](std::size_t i) const {
    return {xs_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  Point point(std::size_t i) const { return Point((*this)[i]); }

  std::size_t size() const { return xs_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return xs_.empty(); }
  int dim() const { return dim_; }
  const std::vector<double>& raw() const { return xs_; }

  PointSet subset(std::span<const std::size_t> idx) const {
    PointSet out(dim_);
    out.xs_.reserve(idx.size() * static_cast<std::size_t>(dim_));
    for (std::size_t i : idx) {
      if (i >= size()) throw std::out_of_range("PointSet::subset: index out of range");
      out.push_back((*this)[i]);
    }
    return out;
  }

  PointSet scaled(double s) const {
    PointSet out(dim_);
    out.xs_.reserve(xs_.size());
    for (double c : xs_) out.xs_.push_back(c * s);
    return out;
  }

  // Axis-aligned bounding box, as (lo, hi) per coordinate.
  void bounds(std::vector<double>& lo, std::vector<double>& hi) const {
    lo.assign(dim_, 0.0);
    hi.assign(dim_, 0.0);
    if (empty()) return;
    for (int c = 0; c < dim_; ++c) lo[c] = hi[c] = xs_[c];
    for (std::size_t i = 1; i < size(); ++i) {
      auto p = (*this)[i];
      for (int c = 0; c < dim_; ++c) {
        lo[c] = std::min(lo[c], p[c]);
        hi[c] = std::max(hi[c], p[c]);
      }
    }
  }

 private:
  int dim_;
  std::vector<double> xs_;
};

}  // namespace kds
