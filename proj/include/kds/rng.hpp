#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace kds {

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_label(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// Counter-based generator: the k-th output is a pure function of (key, k),
// so streams are reproducible and cheap to fork. Named sub-streams keep
// independent parts of a pipeline decoupled from each other's draw counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(detail::mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  // Derived stream; `index` distinguishes e.g. trials or levels under one label.
  Rng stream(std::string_view label, std::uint64_t index = 0) const {
    Rng child(0);
    child.key_ = detail::mix64(key_ ^ detail::mix64(detail::hash_label(label) + 0x9e3779b97f4a7c15ULL * index));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() { return detail::mix64(key_ ^ detail::mix64(counter_++)); }

  // Uniform in [0,1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Fair +1/-1.
  int next_sign() { return (next_u64() & 1) ? 1 : -1; }

  double next_gaussian() {
    // Box-Muller; one value per call keeps the draw count predictable.
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // First `k` elements of a random permutation of {0,...,n-1}.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace kds
