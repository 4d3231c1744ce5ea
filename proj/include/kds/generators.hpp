#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kds/points.hpp"
#include "kds/rng.hpp"

namespace kds {

// Named point-set generators backing `gen` and the experiment harnesses.
// All are deterministic functions of (name, params, n, dim, seed).
//
//   uniform-square          unit cube [0,1)^d
//   uniform-disk            unit-radius ball around the origin
//   gaussian-mixture        k round blobs (param k, default 3; std 0.1)
//   annulus                 radii in [inner, outer] (defaults 0.5, 1.0)
//   coincident-clusters     t sites spaced `separation` apart on a line,
//                           copies split round-robin (params t, separation)
//   two-site                half the points at the origin, half at distance
//                           `separation` on the first axis
inline PointSet generate_points(const std::string& name, std::size_t n, int dim, std::uint64_t seed,
                                const std::map<std::string, double>& params = {}) {
  if (n < 1) throw std::invalid_argument("generate_points: n must be >= 1");
  if (dim < 1) throw std::invalid_argument("generate_points: dim must be >= 1");
  auto param = [&params](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  Rng rng = Rng(seed).stream("gen:" + name);
  PointSet ps(dim);
  std::vector<double> p(dim);

  if (name == "uniform-square") {
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < dim; ++c) p[c] = rng.next_double();
      ps.push_back(p);
    }
  } else if (name == "uniform-disk") {
    for (std::size_t i = 0; i < n; ++i) {
      for (;;) {
        double r2 = 0.0;
        for (int c = 0; c < dim; ++c) {
          p[c] = rng.uniform(-1.0, 1.0);
          r2 += p[c] * p[c];
        }
        if (r2 <= 1.0) break;
      }
      ps.push_back(p);
    }
  } else if (name == "gaussian-mixture") {
    const int k = std::max(1, static_cast<int>(param("k", 3)));
    const double sd = param("std", 0.1);
    PointSet centers(dim);
    for (int j = 0; j < k; ++j) {
      for (int c = 0; c < dim; ++c) p[c] = rng.next_double();
      centers.push_back(p);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto center = centers[rng.next_below(k)];
      for (int c = 0; c < dim; ++c) p[c] = center[c] + sd * rng.next_gaussian();
      ps.push_back(p);
    }
  } else if (name == "annulus") {
    const double inner = param("inner", 0.5);
    const double outer = param("outer", 1.0);
    if (!(0.0 <= inner && inner < outer)) throw std::invalid_argument("annulus: bad radii");
    for (std::size_t i = 0; i < n; ++i) {
      for (;;) {
        double r2 = 0.0;
        for (int c = 0; c < dim; ++c) {
          p[c] = rng.uniform(-outer, outer);
          r2 += p[c] * p[c];
        }
        if (r2 <= outer * outer && r2 >= inner * inner) break;
      }
      ps.push_back(p);
    }
  } else if (name == "coincident-clusters") {
    const int t = std::max(1, static_cast<int>(param("t", 3)));
    const double sep = param("separation", 10.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(p.begin(), p.end(), 0.0);
      p[0] = sep * static_cast<double>(i % t);
      ps.push_back(p);
    }
  } else if (name == "two-site") {
    const double sep = param("separation", 10.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(p.begin(), p.end(), 0.0);
      p[0] = (i % 2 == 0) ? 0.0 : sep;
      ps.push_back(p);
    }
  } else {
    throw std::invalid_argument("generate_points: unknown generator " + name);
  }
  return ps;
}

}  // namespace kds
