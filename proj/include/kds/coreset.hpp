#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kds/coloring.hpp"
#include "kds/kde.hpp"
#include "kds/kernels.hpp"
#include "kds/matching.hpp"
#include "kds/rng.hpp"

namespace kds {

enum class MatchingAlgo { exact, greedy };

inline const char* matching_algo_name(MatchingAlgo a) {
  return a == MatchingAlgo::exact ? "exact" : "greedy";
}

// Default stopping constant c for eps targets; calibrated once on the
// n=4096 Gaussian acceptance workload and fixed here.
inline constexpr double kDefaultSizeConstant = 3.0;

// Stop size for an eps target: c * (1/eps)^{2d/(d+2)} * max(1, ln 1/eps)^{d/(d+2)}.
// In the plane this is c * (1/eps) * sqrt(max(1, ln 1/eps)).
inline std::size_t halving_target_size(double eps, int dim, double c = kDefaultSizeConstant) {
  if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("halving_target_size: eps must be in (0,1)");
  const double d = static_cast<double>(dim);
  const double inv = 1.0 / eps;
  const double expo = 2.0 * d / (d + 2.0);
  const double logpart = std::pow(std::max(1.0, std::log(inv)), d / (d + 2.0));
  return static_cast<std::size_t>(std::ceil(c * std::pow(inv, expo) * logpart));
}

struct HalvingConfig {
  KernelSpec kernel;
  std::optional<double> eps;
  std::optional<std::size_t> size;
  MatchingAlgo algo = MatchingAlgo::exact;
  std::uint64_t seed = 0;
  double size_constant = kDefaultSizeConstant;
  bool verify = false;
  double verify_resolution = 0.0;        // 0 = auto (ties to 1/(n sigma))
  std::size_t verify_max_centers = 2000000;
};

struct LevelRecord {
  std::size_t size_before = 0;
  double matching_cost = 0.0;
  std::uint64_t level_seed = 0;
};

struct EpsSampleResult {
  std::vector<std::size_t> indices;  // positions in the input set, ascending
  PointSet sample{1};
  std::optional<double> target_eps;
  std::size_t target_size = 0;
  std::vector<LevelRecord> levels;
  std::optional<LinfReport> measured;
  bool target_unreachable = false;  // eps target wanted more points than |P|
};

namespace detail {

inline Matching run_matching(const PointSet& ps, MatchingAlgo algo) {
  return algo == MatchingAlgo::exact ? min_cost_matching_exact(ps) : min_cost_matching_greedy(ps);
}

// One halving level over index views. The level RNG stream is keyed by the
// current size, which makes chains invariant under point duplication.
inline LevelRecord halve_once_indices(const PointSet& ps, std::vector<std::size_t>& live,
                                      MatchingAlgo algo, std::uint64_t run_seed) {
  if (live.size() < 2) throw std::invalid_argument("halve_once: need at least 2 points");
  const PointSet sub = ps.subset(live);
  const Matching m = run_matching(sub, algo);
  const std::uint64_t level_seed = Rng(run_seed).stream("level", live.size()).key();
  const Coloring chi = color_from_matching(m, sub.size(), level_seed);
  std::vector<std::size_t> kept;
  kept.reserve((live.size() + 1) / 2);
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (chi[i] > 0) kept.push_back(live[i]);
  }
  LevelRecord rec{live.size(), m.cost, level_seed};
  live = std::move(kept);
  return rec;
}

}  // namespace detail

// Keep the +1-colored half of a fresh matching coloring (leftover included
// on odd sizes): |out| = ceil(|P| / 2).
inline std::pair<PointSet, LevelRecord> halve_once(const PointSet& ps, const HalvingConfig& cfg) {
  std::vector<std::size_t> live(ps.size());
  for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
  const LevelRecord rec = detail::halve_once_indices(ps, live, cfg.algo, cfg.seed);
  return {ps.subset(live), rec};
}

// Repeated halving until the sample reaches the target size (explicit, or
// derived from the eps target). With `verify`, the output carries a
// certified L_inf measurement against the input.
inline EpsSampleResult build_eps_sample(const PointSet& ps, const HalvingConfig& cfg) {
  if (ps.empty()) throw std::invalid_argument("build_eps_sample: empty input");
  if (bool(cfg.eps) == bool(cfg.size))
    throw std::invalid_argument("build_eps_sample: exactly one of eps/size must be set");
  if (ps.dim() != cfg.kernel.dim) throw std::invalid_argument("build_eps_sample: dimension mismatch");

  EpsSampleResult out;
  out.target_eps = cfg.eps;
  if (cfg.size) {
    if (*cfg.size < 1 || *cfg.size > ps.size())
      throw std::invalid_argument("build_eps_sample: size target must be in [1, |P|]");
    out.target_size = *cfg.size;
  } else {
    out.target_size = halving_target_size(*cfg.eps, ps.dim(), cfg.size_constant);
    if (out.target_size > ps.size()) {
      out.target_size = ps.size();
      out.target_unreachable = true;
    }
  }

  std::vector<std::size_t> live(ps.size());
  for (std::size_t i = 0; i < live.size(); ++i) live[i] = i;
  while (live.size() > out.target_size && live.size() >= 2) {
    out.levels.push_back(detail::halve_once_indices(ps, live, cfg.algo, cfg.seed));
  }
  out.indices = live;
  out.sample = ps.subset(live);

  if (cfg.verify) {
    const double sigma = cfg.kernel.slope_bound();
    const double res =
        cfg.verify_resolution > 0.0
            ? cfg.verify_resolution
            : 1.0 / (static_cast<double>(ps.size()) * std::max(sigma, 1.0) *
                     std::sqrt(static_cast<double>(ps.dim())));
    LinfGridEvaluator eval(ps, cfg.kernel, res, cfg.verify_max_centers);
    out.measured = eval.distance_to(out.sample);
  }
  return out;
}

// Uniform sample of `size` distinct points.
inline EpsSampleResult random_sample_baseline(const PointSet& ps, std::size_t size, std::uint64_t seed) {
  if (size < 1 || size > ps.size())
    throw std::invalid_argument("random_sample_baseline: size must be in [1, |P|]");
  Rng rng = Rng(seed).stream("random-sample");
  EpsSampleResult out;
  out.target_size = size;
  out.indices = rng.sample_without_replacement(ps.size(), size);
  out.sample = ps.subset(out.indices);
  return out;
}

}  // namespace kds
