#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "kds/experiments.hpp"

using namespace kds;

namespace {

ExperimentSpec small_growth_spec() {
  ExperimentSpec spec;
  spec.kind = "disc-growth";
  spec.n_grid = {16, 64};
  spec.trials = 3;
  spec.kernels = {"gaussian", "triangle"};
  spec.net_max_centers = 60000;
  spec.seed = 5;
  // growth thresholds are meaningless at this scale; disable the gates
  spec.matching_slope_max = 10.0;
  spec.random_slope_min = -10.0;
  return spec;
}

}  // namespace

TEST_CASE("disc growth runner produces a full provenance table", "[experiments]") {
  const ExperimentSpec spec = small_growth_spec();
  const ExperimentResult res = run_experiment(spec);
  // per (n, trial): cost + seconds + 4 metrics per kernel
  CHECK(res.table.size() == 2 * 3 * (2 + 4 * 2));
  for (const ResultRow& row : res.table) {
    CHECK(row.experiment == "disc-growth");
    CHECK(!row.config_hash.empty());
    CHECK(row.seed != 0);
  }
  CHECK(res.summary.contains("assertions"));
  CHECK(res.summary["assertions"].size() == 4);  // two slopes per kernel
  CHECK(res.all_pass);

  // matching colorings already dominate iid at n=64
  const auto& med = res.summary["medians"]["gaussian"]["n64"];
  CHECK(med["matching"].get<double>() < med["random"].get<double>());
}

TEST_CASE("experiment tables are reproducible and schema-stable", "[experiments]") {
  const ExperimentSpec spec = small_growth_spec();
  const ExperimentResult a = run_experiment(spec);
  const ExperimentResult b = run_experiment(spec);
  REQUIRE(a.table.size() == b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    CHECK(a.table[i].metric == b.table[i].metric);
    // wall-clock diagnostics are the one legitimately nondeterministic metric
    if (a.table[i].metric != "matching_seconds") CHECK(a.table[i].value == b.table[i].value);
    CHECK(a.table[i].seed == b.table[i].seed);
  }
  std::stringstream ss;
  write_result_csv(a.table, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "schema,experiment,config_hash,n,eps,eta,trial,seed,metric,value");
}

TEST_CASE("coincident clusters have zero matching discrepancy at every n", "[experiments]") {
  ExperimentSpec spec;
  spec.kind = "disc-growth";
  spec.generator = "coincident-clusters";
  spec.generator_params = {{"t", 4.0}, {"separation", 3.0}};
  spec.n_grid = {16, 32};
  spec.trials = 2;
  spec.kernels = {"triangle"};
  spec.net_max_centers = 60000;
  spec.matching_slope_max = 10.0;
  spec.random_slope_min = -10.0;
  const ExperimentResult res = run_experiment(spec);
  for (const ResultRow& row : res.table) {
    if (row.metric.rfind("disc_matching", 0) == 0) {
      CHECK_THAT(row.value, Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("size floor check at eps = 0.25", "[experiments]") {
  // t = 3 sites: any 2-point sample misses one, off by 1/3 > 1/4 there
  const SizeFloorCheck check =
      run_size_floor_check(0.25, KernelSpec(KernelFamily::triangle, 2), 12);
  CHECK(check.sites == 3);
  CHECK(check.all_missing_exceed_eps);
  CHECK(check.min_missing_linf > 0.25);
  CHECK(check.halving_keeps_sites);
  CHECK(check.pass);
}

TEST_CASE("delta kernel demo slope", "[experiments][slow]") {
  ExperimentSpec spec;
  spec.kind = "delta-kernel";
  spec.eta_grid = {1, 2, 4};
  spec.net_max_centers = 150000;
  const ExperimentResult res = run_experiment(spec);
  CHECK(res.all_pass);
  const double slope = res.summary["assertions"][0]["value"].get<double>();
  CHECK(std::abs(slope - 1.0) <= 0.1);
}

TEST_CASE("frontier runner works at toy scale", "[experiments][slow]") {
  ExperimentSpec spec;
  spec.kind = "eps-frontier";
  spec.frontier_n = 256;
  spec.frontier_trials = 3;
  spec.frontier_accept = 2;
  spec.eps_grid = {0.2, 0.1};
  spec.matching = MatchingAlgo::exact;
  spec.grid_max_centers = 60000;
  spec.net_max_centers = 60000;
  // slopes at toy scale are noisy; gates off
  spec.halving_size_slope_max = 100.0;
  spec.random_size_slope_min = -100.0;
  const ExperimentResult res = run_experiment(spec);
  // halving needs fewer points than uniform sampling already at eps = 0.1
  double h = 0, r = 0;
  for (const auto& row : res.summary["per_eps"]) {
    if (row["eps"].get<double>() == 0.1) {
      h = row["halving_min_size"].get<double>();
      r = row["random_min_size"].get<double>();
    }
  }
  CHECK(h > 0);
  CHECK(r > 0);
  CHECK(h <= r);
  CHECK(res.summary["assertions"].size() == 3);
}

TEST_CASE("experiment specs round-trip through json", "[experiments]") {
  ExperimentSpec spec = small_growth_spec();
  nlohmann::json j = spec;
  const ExperimentSpec back = j.get<ExperimentSpec>();
  CHECK(back.kind == spec.kind);
  CHECK(back.n_grid == spec.n_grid);
  CHECK(back.kernels == spec.kernels);
  CHECK(back.net_max_centers == spec.net_max_centers);
  nlohmann::json j2 = back;
  CHECK(j == j2);
  ExperimentSpec bogus;
  bogus.kind = "nope";
  CHECK_THROWS_AS(run_experiment(bogus), std::invalid_argument);
}
