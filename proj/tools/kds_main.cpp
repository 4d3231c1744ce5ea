// kds: build and certify small samples of kernel range spaces.
//
// Subcommands: gen, match, disc, sample, eval, experiment. All randomness
// flows from --seed through named sub-streams; every run echoes its
// resolved configuration as a JSON line for provenance.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kds/kds.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string format = "json";
  bool quiet = false;
};

void echo_config(const GlobalOpts& g, const std::string& command, const json& cfg) {
  if (g.quiet) return;
  json line{{"command", command}, {"config", cfg}};
  line["config"]["seed"] = g.seed;
  line["config"]["threads"] = kds::thread_count();
  line["config"]["format"] = g.format;
  std::cout << line.dump() << "\n";
}

json matching_to_json(const kds::Matching& m) {
  json pairs = json::array();
  for (auto [i, j] : m.pairs) pairs.push_back(json::array({i, j}));
  json out{{"pairs", pairs}, {"cost", m.cost}};
  if (m.leftover) out["leftover"] = *m.leftover;
  else out["leftover"] = nullptr;
  return out;
}

json linf_to_json(const kds::LinfReport& r) {
  return json{{"value", r.value},
              {"argmax", r.argmax.coords},
              {"grid_tau", r.grid_tau},
              {"slack", r.slack},
              {"certified", r.certified},
              {"grid_size", r.grid_size}};
}

json disc_report_to_json(const kds::DiscrepancyReport& r) {
  json out{{"max_disc", r.max_disc},
           {"argmax", r.argmax_center.coords},
           {"center_count", r.center_count},
           {"net_tau", r.net_tau},
           {"additive_slack", r.additive_slack}};
  if (r.sum_delta_sq) out["sum_delta_sq"] = *r.sum_delta_sq;
  if (r.chernoff_at_max) out["chernoff_at_max"] = *r.chernoff_at_max;
  return out;
}

int run_gen(const GlobalOpts& g, const std::string& generator, std::size_t n, int dim,
            const std::map<std::string, double>& params, const std::string& out_path) {
  echo_config(g, "gen",
              json{{"generator", generator}, {"n", n}, {"dim", dim}, {"params", params}, {"out", out_path}});
  const kds::PointSet ps = kds::generate_points(generator, n, dim, g.seed, params);
  kds::save_points(ps, out_path);
  json result{{"written", out_path}, {"n", ps.size()}, {"dim", ps.dim()}};
  std::cout << result.dump() << "\n";
  return 0;
}

int run_match(const GlobalOpts& g, const std::string& in_path, const std::string& algo,
              const std::string& out_path) {
  echo_config(g, "match", json{{"input", in_path}, {"algo", algo}});
  const kds::PointSet ps = kds::load_points(in_path);
  kds::Matching m;
  if (algo == "exact") m = kds::min_cost_matching_exact(ps);
  else if (algo == "greedy") m = kds::min_cost_matching_greedy(ps);
  else if (algo == "brute") m = kds::min_cost_matching_bruteforce(ps);
  else throw CLI::ValidationError("--algo must be exact|greedy|brute");
  const json out = matching_to_json(m);
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    f << out.dump(2) << "\n";
  }
  std::cout << out.dump() << "\n";
  return 0;
}

int run_disc(const GlobalOpts& g, const std::string& in_path, const std::string& kernel_str,
             const std::string& coloring, int trials, const std::string& net_tau,
             std::size_t net_max_centers, const std::string& per_center_csv) {
  echo_config(g, "disc",
              json{{"input", in_path},
                   {"kernel", kernel_str},
                   {"coloring", coloring},
                   {"trials", trials},
                   {"net_tau", net_tau},
                   {"net_max_centers", net_max_centers}});
  const kds::PointSet ps = kds::load_points(in_path);
  const kds::KernelSpec kernel = kds::parse_kernel(kernel_str, ps.dim());
  kds::NetConfig cfg;
  cfg.max_centers = net_max_centers;
  if (net_tau != "auto") cfg.tau = std::stod(net_tau);
  const kds::EvaluationNet net = kds::build_evaluation_net(ps, kernel, cfg);

  if (coloring == "brute") {
    const double best = kds::min_discrepancy_bruteforce(ps, kernel, net);
    json out{{"min_disc", best}, {"center_count", net.size()}, {"net_tau", net.tau}};
    std::cout << out.dump() << "\n";
    return 0;
  }

  std::optional<kds::Matching> matching;
  if (coloring == "matching") matching = kds::min_cost_matching_exact(ps);
  else if (coloring != "random") throw CLI::ValidationError("--coloring must be matching|random|brute");

  json reports = json::array();
  std::vector<double> values;
  const bool keep_centers = !per_center_csv.empty();
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed_t = kds::Rng(g.seed).stream("disc-trial", t).key();
    const kds::Coloring chi = matching ? kds::color_from_matching(*matching, ps.size(), seed_t)
                                       : kds::random_coloring(ps.size(), seed_t);
    kds::DiscrepancyReport rep = kds::max_discrepancy(ps, chi, kernel, net, keep_centers && t == 0);
    if (matching) kds::annotate_chernoff(rep, ps, *matching, kernel);
    if (keep_centers && t == 0 && rep.per_center) {
      std::ofstream f(per_center_csv);
      f << "index";
      for (int c = 0; c < net.dim; ++c) f << ",x" << c;
      f << ",disc\n";
      for (std::size_t i = 0; i < net.size(); ++i) {
        f << i;
        for (double c : net[i]) f << ',' << kds::format_double(c);
        f << ',' << kds::format_double((*rep.per_center)[i]) << "\n";
      }
    }
    json jr = disc_report_to_json(rep);
    jr["seed"] = seed_t;
    reports.push_back(jr);
    values.push_back(rep.max_disc);
  }
  std::sort(values.begin(), values.end());
  json out{{"reports", reports},
           {"median_max_disc", values[values.size() / 2]},
           {"center_count", net.size()},
           {"net_tau", net.tau},
           {"truncated", net.truncated}};
  std::cout << out.dump() << "\n";
  return 0;
}

int run_sample(const GlobalOpts& g, const std::string& in_path, std::optional<double> eps,
               std::optional<std::size_t> size, const std::string& kernel_str, const std::string& algo,
               bool verify, double size_constant, const std::string& out_path,
               const std::string& diag_path) {
  echo_config(g, "sample",
              json{{"input", in_path},
                   {"eps", eps ? json(*eps) : json(nullptr)},
                   {"size", size ? json(*size) : json(nullptr)},
                   {"kernel", kernel_str},
                   {"matching", algo},
                   {"verify", verify},
                   {"c", size_constant},
                   {"out", out_path}});
  const kds::PointSet ps = kds::load_points(in_path);
  kds::HalvingConfig cfg{kds::parse_kernel(kernel_str, ps.dim())};
  cfg.eps = eps;
  if (size) cfg.size = *size;
  if (algo != "exact" && algo != "greedy") throw CLI::ValidationError("--matching must be exact|greedy");
  cfg.algo = algo == "greedy" ? kds::MatchingAlgo::greedy : kds::MatchingAlgo::exact;
  cfg.seed = g.seed;
  cfg.size_constant = size_constant;
  cfg.verify = verify;
  const kds::EpsSampleResult res = kds::build_eps_sample(ps, cfg);
  if (!out_path.empty()) kds::save_points(res.sample, out_path);

  json levels = json::array();
  for (const kds::LevelRecord& lev : res.levels) {
    levels.push_back(json{{"size_before", lev.size_before},
                          {"matching_cost", lev.matching_cost},
                          {"seed", lev.level_seed}});
  }
  json out{{"sample_size", res.sample.size()},
           {"target_size", res.target_size},
           {"target_eps", res.target_eps ? json(*res.target_eps) : json(nullptr)},
           {"levels", levels},
           {"indices", res.indices},
           {"target_unreachable", res.target_unreachable},
           {"matching", algo},
           {"measured", res.measured ? linf_to_json(*res.measured) : json(nullptr)}};
  if (!diag_path.empty()) {
    std::ofstream f(diag_path);
    f << out.dump(2) << "\n";
  }
  std::cout << out.dump() << "\n";
  if (verify && eps && res.measured && res.measured->value > *eps) {
    std::cerr << "verification failed: measured " << res.measured->value << " > eps " << *eps << "\n";
    return 1;
  }
  return 0;
}

int run_eval(const GlobalOpts& g, const std::string& path1, const std::string& path2,
             const std::string& kernel_str, double resolution, std::size_t max_centers,
             const std::string& diff_csv) {
  echo_config(g, "eval",
              json{{"input1", path1},
                   {"input2", path2},
                   {"kernel", kernel_str},
                   {"resolution", resolution},
                   {"max_centers", max_centers}});
  const kds::PointSet a = kds::load_points(path1);
  const kds::PointSet b = kds::load_points(path2);
  if (a.dim() != b.dim()) throw CLI::ValidationError("point sets have different dimensions");
  const kds::KernelSpec kernel = kds::parse_kernel(kernel_str, a.dim());
  double res = resolution;
  if (res <= 0.0) {
    const double sigma = kernel.family == kds::KernelFamily::ball ? 1.0 : kernel.slope_bound();
    res = 1.0 / (static_cast<double>(a.size()) * std::max(sigma, 1.0) *
                 std::sqrt(static_cast<double>(a.dim())));
  }
  const kds::LinfReport rep = kds::linf_distance(kds::KdeQuery(a, kernel), kds::KdeQuery(b, kernel),
                                                 res, max_centers);
  if (!diff_csv.empty()) {
    // dump the difference field for external plotting
    const kds::EvaluationNet net = kds::build_linf_grid(a, kernel, res, max_centers);
    const kds::KdeQuery qa(a, kernel), qb(b, kernel);
    std::ofstream f(diff_csv);
    f << "index";
    for (int c = 0; c < net.dim; ++c) f << ",x" << c;
    f << ",diff\n";
    for (std::size_t i = 0; i < net.size(); ++i) {
      f << i;
      for (double c : net[i]) f << ',' << kds::format_double(c);
      f << ',' << kds::format_double(kds::kde_value(qa, net[i]) - kds::kde_value(qb, net[i])) << "\n";
    }
  }
  std::cout << linf_to_json(rep).dump() << "\n";
  return 0;
}

int run_experiment_cmd(const GlobalOpts& g, const std::string& spec_path, const std::string& out_csv,
                       const std::string& out_summary) {
  std::ifstream f(spec_path);
  if (!f) throw CLI::ValidationError("cannot open experiment spec: " + spec_path);
  json j;
  f >> j;
  kds::ExperimentSpec spec = j.get<kds::ExperimentSpec>();
  echo_config(g, "experiment", json{{"spec", spec_path}, {"resolved", json(spec)}});
  const kds::ExperimentResult result = kds::run_experiment(spec);
  if (!out_csv.empty()) {
    std::ofstream fc(out_csv);
    kds::write_result_csv(result.table, fc);
  }
  if (!out_summary.empty()) {
    std::ofstream fs(out_summary);
    fs << result.summary.dump(2) << "\n";
  }
  std::cout << result.summary.dump() << "\n";
  return result.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kds: small certified samples of kernel range spaces"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master RNG seed; all sub-streams derive from it");
  app.add_option("--threads", g.threads, "worker threads for data-parallel loops");
  app.add_option("--format", g.format, "output format (json)")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", g.quiet, "suppress the config echo line");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a point set");
  std::string gen_name, gen_out = "points.csv";
  std::size_t gen_n = 100;
  int gen_dim = 2;
  std::map<std::string, double> gen_params;
  double p_t = -1, p_sep = -1, p_k = -1, p_std = -1, p_inner = -1, p_outer = -1;
  gen->add_option("generator", gen_name,
                  "uniform-square|uniform-disk|gaussian-mixture|annulus|coincident-clusters|two-site")
      ->required();
  gen->add_option("--n", gen_n, "number of points");
  gen->add_option("--dim", gen_dim, "dimension");
  gen->add_option("--out", gen_out, "output file (.csv or .json)");
  gen->add_option("--t", p_t, "site count (coincident-clusters)");
  gen->add_option("--separation", p_sep, "site separation (coincident-clusters, two-site)");
  gen->add_option("--k", p_k, "component count (gaussian-mixture)");
  gen->add_option("--std", p_std, "component spread (gaussian-mixture)");
  gen->add_option("--inner", p_inner, "inner radius (annulus)");
  gen->add_option("--outer", p_outer, "outer radius (annulus)");

  // match
  auto* match = app.add_subcommand("match", "min-cost perfect matching");
  std::string match_in, match_algo = "exact", match_out;
  match->add_option("input", match_in, "points file")->required();
  match->add_option("--algo", match_algo, "exact|greedy|brute");
  match->add_option("--out", match_out, "also write the JSON result here");

  // disc
  auto* disc = app.add_subcommand("disc", "kernel discrepancy of a coloring over a net");
  std::string disc_in, disc_kernel = "gaussian", disc_coloring = "matching", disc_tau = "auto",
              disc_csv;
  int disc_trials = 1;
  std::size_t disc_cap = 10000000;
  disc->add_option("input", disc_in, "points file")->required();
  disc->add_option("--kernel", disc_kernel, "kernel spec, e.g. gaussian:w=1.0");
  disc->add_option("--coloring", disc_coloring, "matching|random|brute");
  disc->add_option("--trials", disc_trials, "independent colorings to evaluate")->check(CLI::PositiveNumber);
  disc->add_option("--net-tau", disc_tau, "covering radius (auto = 1/(n max(sigma,1)))");
  disc->add_option("--net-max-centers", disc_cap, "cap on net size; coarsens beyond");
  disc->add_option("--per-center-csv", disc_csv, "dump per-center values of the first trial");

  // sample
  auto* sample = app.add_subcommand("sample", "construct an eps-sample by halving");
  std::string sample_in, sample_kernel = "gaussian", sample_algo = "exact", sample_out, sample_diag;
  double sample_eps = -1, sample_c = kds::kDefaultSizeConstant;
  std::int64_t sample_size = -1;
  bool sample_verify = false;
  sample->add_option("input", sample_in, "points file")->required();
  sample->add_option("--eps", sample_eps, "target L_inf error in (0,1)");
  sample->add_option("--size", sample_size, "explicit target size");
  sample->add_option("--kernel", sample_kernel, "kernel spec");
  sample->add_option("--matching", sample_algo, "exact|greedy");
  sample->add_option("--c", sample_c, "stop-size constant");
  sample->add_flag("--verify", sample_verify, "measure L_inf of the output against the input");
  sample->add_option("--out", sample_out, "write the sample points here");
  sample->add_option("--diagnostics", sample_diag, "write the JSON diagnostics here");

  // eval
  auto* eval = app.add_subcommand("eval", "certified L_inf distance of two KDEs");
  std::string eval_a, eval_b, eval_kernel = "gaussian", eval_csv;
  double eval_res = 0.0;
  std::size_t eval_cap = 10000000;
  eval->add_option("input1", eval_a, "points file")->required();
  eval->add_option("input2", eval_b, "points file")->required();
  eval->add_option("--kernel", eval_kernel, "kernel spec");
  eval->add_option("--resolution", eval_res, "grid spacing (0 = auto)");
  eval->add_option("--max-centers", eval_cap, "cap on grid size");
  eval->add_option("--diff-csv", eval_csv, "dump the difference field");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a scripted experiment");
  std::string exp_spec, exp_csv, exp_summary;
  exp->add_option("--spec", exp_spec, "experiment spec JSON")->required();
  exp->add_option("--out-csv", exp_csv, "write the result table here");
  exp->add_option("--out-summary", exp_summary, "write the JSON summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  if (g.threads > 0) kds::set_thread_count(g.threads);

  try {
    if (*gen) {
      if (p_t >= 0) gen_params["t"] = p_t;
      if (p_sep >= 0) gen_params["separation"] = p_sep;
      if (p_k >= 0) gen_params["k"] = p_k;
      if (p_std >= 0) gen_params["std"] = p_std;
      if (p_inner >= 0) gen_params["inner"] = p_inner;
      if (p_outer >= 0) gen_params["outer"] = p_outer;
      return run_gen(g, gen_name, gen_n, gen_dim, gen_params, gen_out);
    }
    if (*match) return run_match(g, match_in, match_algo, match_out);
    if (*disc) return run_disc(g, disc_in, disc_kernel, disc_coloring, disc_trials, disc_tau, disc_cap, disc_csv);
    if (*sample) {
      std::optional<double> eps;
      std::optional<std::size_t> size;
      if (sample_eps > 0) eps = sample_eps;
      if (sample_size > 0) size = static_cast<std::size_t>(sample_size);
      return run_sample(g, sample_in, eps, size, sample_kernel, sample_algo, sample_verify, sample_c,
                        sample_out, sample_diag);
    }
    if (*eval) return run_eval(g, eval_a, eval_b, eval_kernel, eval_res, eval_cap, eval_csv);
    if (*exp) return run_experiment_cmd(g, exp_spec, exp_csv, exp_summary);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
