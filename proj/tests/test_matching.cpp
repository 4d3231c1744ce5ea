#include <catch2/catch_amalgamated.hpp>

#include "kds/matching.hpp"
#include "kds/rng.hpp"

using namespace kds;

namespace {

PointSet random_points(Rng& rng, std::size_t n, int dim, double lo = 0.0, double hi = 1.0) {
  PointSet ps(dim);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) p[c] = rng.uniform(lo, hi);
    ps.push_back(p);
  }
  return ps;
}

PointSet line_points(std::initializer_list<double> xs) {
  PointSet ps(2);
  for (double x : xs) ps.push_back({x, 0.0});
  return ps;
}

}  // namespace

TEST_CASE("single pair matches trivially", "[matching]") {
  PointSet ps(2);
  ps.push_back({0.0, 0.0});
  ps.push_back({3.0, 4.0});
  for (const Matching& m : {min_cost_matching_exact(ps), min_cost_matching_greedy(ps),
                            min_cost_matching_bruteforce(ps)}) {
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0] == std::pair<int, int>(0, 1));
    CHECK_THAT(m.cost, Catch::Matchers::WithinAbs(5.0, 1e-12));
    CHECK_FALSE(m.leftover.has_value());
  }
}

TEST_CASE("line instance picks short pairs", "[matching]") {
  // All three perfect matchings of {0,1,10,11} cost 2, 20, 20.
  PointSet ps = line_points({0.0, 1.0, 10.0, 11.0});
  const Matching exact = min_cost_matching_exact(ps);
  CHECK_THAT(exact.cost, Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK(exact.pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
  const Matching greedy = min_cost_matching_greedy(ps);
  CHECK_THAT(greedy.cost, Catch::Matchers::WithinAbs(2.0, 1e-12));
  const Matching brute = min_cost_matching_bruteforce(ps);
  CHECK_THAT(brute.cost, Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("unit square corners cost 2", "[matching]") {
  PointSet ps(2);
  ps.push_back({0.0, 0.0});
  ps.push_back({1.0, 0.0});
  ps.push_back({0.0, 1.0});
  ps.push_back({1.0, 1.0});
  CHECK_THAT(min_cost_matching_exact(ps).cost, Catch::Matchers::WithinAbs(2.0, 1e-12));
  const Matching brute = min_cost_matching_bruteforce(ps);
  CHECK_THAT(brute.cost, Catch::Matchers::WithinAbs(2.0, 1e-12));
  // Two optimal matchings exist; the oracle canonicalizes lexicographically.
  CHECK(brute.pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
}

TEST_CASE("exact agrees with brute force on random instances", "[matching][oracle]") {
  Rng rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = (trial % 2) ? 3 : 2;
    const std::size_t n = 4 + 2 * (trial % 4);
    PointSet ps = random_points(rng, n, dim);
    const Matching exact = min_cost_matching_exact(ps);
    const Matching brute = min_cost_matching_bruteforce(ps);
    INFO("trial " << trial << " n=" << n << " dim=" << dim);
    CHECK_THAT(exact.cost, Catch::Matchers::WithinAbs(brute.cost, 1e-9));
    CHECK(exact.pairs.size() == n / 2);
  }
}

TEST_CASE("exact handles adversarial tie-heavy instances", "[matching][oracle]") {
  Rng rng(7);
  // Integer grids and duplicated sites force equal-cost alternatives and
  // blossom formation; costs must still match the oracle.
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 4 + 2 * (trial % 5);
    PointSet ps(2);
    for (std::size_t i = 0; i < n; ++i) {
      ps.push_back({static_cast<double>(rng.next_below(3)), static_cast<double>(rng.next_below(3))});
    }
    const Matching exact = min_cost_matching_exact(ps);
    const Matching brute = min_cost_matching_bruteforce(ps);
    INFO("trial " << trial << " n=" << n);
    CHECK_THAT(exact.cost, Catch::Matchers::WithinAbs(brute.cost, 1e-9));
  }
}

TEST_CASE("coincident points match at zero cost", "[matching]") {
  PointSet ps(2);
  for (int i = 0; i < 8; ++i) ps.push_back({0.5, 0.5});
  const Matching m = min_cost_matching_exact(ps);
  CHECK(m.pairs.size() == 4);
  CHECK_THAT(m.cost, Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("odd n sets aside the most isolated point", "[matching]") {
  PointSet ps = line_points({0.0, 1.0, 2.0, 3.0, 50.0});
  for (const Matching& m : {min_cost_matching_exact(ps), min_cost_matching_greedy(ps)}) {
    REQUIRE(m.leftover.has_value());
    CHECK(*m.leftover == 4);
    CHECK(m.pairs.size() == 2);
  }
}

TEST_CASE("greedy never beats exact", "[matching]") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    PointSet ps = random_points(rng, 40, 2);
    const double exact = min_cost_matching_exact(ps).cost;
    const double greedy = min_cost_matching_greedy(ps).cost;
    CHECK(greedy >= exact - 1e-9);
  }
}

TEST_CASE("greedy stays within factor 3 of exact on n=100", "[matching]") {
  Rng rng(123);
  PointSet ps = random_points(rng, 100, 2);
  const double exact = min_cost_matching_exact(ps).cost;
  const double greedy = min_cost_matching_greedy(ps).cost;
  CHECK(greedy <= 3.0 * exact);
}

TEST_CASE("matching cost scales linearly with coordinates", "[matching]") {
  Rng rng(4242);
  PointSet ps = random_points(rng, 24, 2);
  const double base = min_cost_matching_exact(ps).cost;
  const double scaled = min_cost_matching_exact(ps.scaled(7.5)).cost;
  CHECK_THAT(scaled, Catch::Matchers::WithinRel(7.5 * base, 1e-9));
}

TEST_CASE("usage errors", "[matching]") {
  PointSet one(2);
  one.push_back({0.0, 0.0});
  CHECK_THROWS_AS(min_cost_matching_exact(one), std::invalid_argument);
  CHECK_THROWS_AS(min_cost_matching_greedy(one), std::invalid_argument);
  PointSet odd(2);
  for (int i = 0; i < 5; ++i) odd.push_back({double(i), 0.0});
  CHECK_THROWS_AS(min_cost_matching_bruteforce(odd), std::invalid_argument);
  PointSet big(2);
  for (int i = 0; i < 14; ++i) big.push_back({double(i), 0.0});
  CHECK_THROWS_AS(min_cost_matching_bruteforce(big), std::invalid_argument);
}
