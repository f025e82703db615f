// Command-line front end: graph/tree sampling, exact and greedy solving,
// certified bounds, cut-off tree construction, witness pipelines, and the
// Monte Carlo experiment harness.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "acq/bounds.hpp"
#include "acq/cutoff.hpp"
#include "acq/embed.hpp"
#include "acq/engine.hpp"
#include "acq/experiments.hpp"
#include "acq/graph.hpp"

namespace {

using namespace acq;

struct OutSink {
  std::string path;  // empty = stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
  }
};

Graph load_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open graph file: " + path);
  return read_edge_list(f);
}

std::string graph_text(const Graph& g) {
  std::ostringstream out;
  write_edge_list(g, out);
  return out.str();
}

ParamSet make_params(int n, double eps, int sigma, double alpha, double beta) {
  return ParamSet::make(n, eps, sigma, alpha, beta);
}

int run(int argc, char** argv) {
  CLI::App app{"total acquisition game toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global flags after the subcommand

  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out_path;
  app.add_option("--seed", seed, "base random seed")->capture_default_str();
  app.add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "write output to a file instead of stdout");

  // --- gnp ---------------------------------------------------------------
  auto* gnp = app.add_subcommand("gnp", "sample G(n,p) and write an edge list");
  int gnp_n = 0;
  double gnp_p = 0.0;
  gnp->add_option("--n", gnp_n, "vertex count")->required();
  gnp->add_option("--p", gnp_p, "edge probability")->check(CLI::Range(0.0, 1.0))->required();

  // --- tree random ---------------------------------------------------------
  auto* tree = app.add_subcommand("tree", "tree sampling");
  auto* tree_random = tree->add_subcommand("random", "uniform random labeled tree");
  int tree_n = 0;
  tree_random->add_option("--n", tree_n, "vertex count (>= 2)")->required();

  // --- solve ---------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "compute the total acquisition number");
  std::string solve_in, witness_out;
  std::uint64_t budget = 50'000'000;
  int restarts = 8;
  auto* solve_exact = solve->add_subcommand("exact", "exhaustive state-space search");
  solve_exact->add_option("--in", solve_in, "edge-list file")->required();
  solve_exact->add_option("--budget", budget, "node expansion limit")->capture_default_str();
  solve_exact->add_option("--witness-out", witness_out, "write the witness protocol");
  auto* solve_greedy = solve->add_subcommand("greedy", "heaviest-receiver heuristic");
  solve_greedy->add_option("--in", solve_in, "edge-list file")->required();
  solve_greedy->add_option("--restarts", restarts, "randomized restarts")->capture_default_str();
  solve_greedy->add_option("--witness-out", witness_out, "write the witness protocol");

  // --- verify ----------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "replay a protocol file against a graph");
  std::string verify_graph, verify_proto;
  verify->add_option("--in", verify_graph, "edge-list file")->required();
  verify->add_option("--protocol", verify_proto, "protocol file")->required();

  // --- bound -----------------------------------------------------------------
  auto* bound = app.add_subcommand("bound", "certified lower bounds and diagnostics");
  std::string bound_in;
  bound->add_option("--in", bound_in, "edge-list file")->required();

  // --- ctree -----------------------------------------------------------------
  auto* ctree = app.add_subcommand("ctree", "calibrated cut-off tree operations");
  int ct_n = 0, ct_sigma = -1;
  double ct_eps = 0.5, ct_alpha = 0.04, ct_beta = 0.14;
  bool ct_pruned = false;
  auto* ct_build = ctree->add_subcommand("build", "calibrate and build the tree");
  ct_build->add_option("--n", ct_n, "target graph size")->required();
  ct_build->add_option("--eps", ct_eps, "threshold margin eps")->capture_default_str();
  ct_build->add_option("--sigma", ct_sigma, "bad-children allowance (-1 = 4/eps^2)")
      ->capture_default_str();
  ct_build->add_option("--alpha", ct_alpha)->capture_default_str();
  ct_build->add_option("--beta", ct_beta)->capture_default_str();
  ct_build->add_flag("--pruned", ct_pruned, "prune bottom leaves of loose parents");
  std::string ct_in;
  auto* ct_check = ctree->add_subcommand("check", "run structure checks on a tree file");
  ct_check->add_option("--in", ct_in, "tree file")->required();
  auto* ct_proto = ctree->add_subcommand("protocol", "emit the root-absorption protocol");
  ct_proto->add_option("--in", ct_in, "tree file")->required();

  // --- pipeline ---------------------------------------------------------------
  auto* pipeline = app.add_subcommand("pipeline", "embedding + matching witness pipelines");
  int pl_n = 0, pl_sigma = 3;
  double pl_p = -1.0, pl_mult = -1.0, pl_eps = -1.0, pl_alpha = 0.04, pl_beta = 0.14;
  double pl_c = -1.0;
  std::string pl_witness_out;
  auto add_pipeline_opts = [&](CLI::App* cmd) {
    cmd->add_option("--n", pl_n, "graph size")->required();
    cmd->add_option("--p", pl_p, "edge probability (overrides --p-mult)");
    cmd->add_option("--p-mult", pl_mult, "multiple of the threshold log2(n)/n");
    cmd->add_option("--eps", pl_eps, "eps (default: max(0.1, p n/log2(n) - 1))");
    cmd->add_option("--sigma", pl_sigma, "bad-children allowance")->capture_default_str();
    cmd->add_option("--alpha", pl_alpha)->capture_default_str();
    cmd->add_option("--beta", pl_beta)->capture_default_str();
    cmd->add_option("--witness-out", pl_witness_out, "write the witness protocol");
  };
  auto* pl_single = pipeline->add_subcommand("single", "one-root total-absorption witness");
  add_pipeline_opts(pl_single);
  auto* pl_multi = pipeline->add_subcommand("multi", "multi-root sparse-regime upper bound");
  add_pipeline_opts(pl_multi);
  pl_multi->add_option("--c", pl_c, "degree coefficient in (0,1) (default p n log2/log n)");

  // --- sweep ---------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over (n, multiplier) cells");
  SweepConfig cfg;
  cfg.n_list = {4096, 16384, 65536};
  cfg.multipliers = {0.6, 0.8, 1.0, 1.2, 1.4};
  sweep->add_option("--n-list", cfg.n_list, "graph sizes")->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--multipliers", cfg.multipliers, "factors of log2(n)/n")->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--trials", cfg.trials, "trials per cell")->capture_default_str();
  sweep->add_option("--eps", cfg.eps, "fixed eps (<=0: derive per cell)")
      ->capture_default_str();
  sweep->add_option("--sigma", cfg.sigma)->capture_default_str();

  // --- treestats ---------------------------------------------------------------
  auto* treestats = app.add_subcommand("treestats", "long-leaf density of random trees");
  int ts_n = 10'000, ts_trials = 200;
  treestats->add_option("--n", ts_n)->capture_default_str();
  treestats->add_option("--trials", ts_trials)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return 2;
  }
  OutSink sink{out_path};

  if (*gnp) {
    RandomSource rng(seed);
    sink.write(graph_text(sample_gnp(gnp_n, gnp_p, rng)));
    return 0;
  }

  if (*tree_random) {
    RandomSource rng(seed);
    sink.write(graph_text(sample_random_tree(tree_n, rng)));
    return 0;
  }

  if (*solve_exact || *solve_greedy) {
    Graph g = load_graph(solve_in);
    int value = 0;
    bool exact = true;
    std::uint64_t expanded = 0;
    Protocol witness;
    if (*solve_exact) {
      auto res = exact_at(g, budget);
      value = res.value;
      exact = res.exact;
      expanded = res.expanded;
      witness = std::move(res.witness);
    } else {
      RandomSource rng(seed);
      auto res = greedy_at(g, rng, restarts);
      value = res.upper_bound;
      exact = false;
      witness = std::move(res.witness);
    }
    if (!witness_out.empty()) {
      std::ofstream f(witness_out);
      if (!f) throw std::runtime_error("cannot open witness file: " + witness_out);
      write_protocol(witness, f);
    }
    std::ostringstream text;
    if (format == "json") {
      nlohmann::ordered_json j;
      j["n"] = g.vertex_count();
      j["value"] = value;
      j["exact"] = exact;
      j["expanded"] = expanded;
      j["witness_moves"] = witness.size();
      text << j.dump() << '\n';
    } else {
      text << "n " << g.vertex_count() << '\n'
           << "value " << value << '\n'
           << "exact " << (exact ? 1 : 0) << '\n'
           << "expanded " << expanded << '\n'
           << "witness_moves " << witness.size() << '\n';
    }
    sink.write(text.str());
    return 0;
  }

  if (*verify) {
    Graph g = load_graph(verify_graph);
    std::ifstream pf(verify_proto);
    if (!pf) throw std::runtime_error("cannot open protocol file: " + verify_proto);
    auto res = verify_protocol(g, read_protocol(pf));
    std::ostringstream text;
    if (res.ok) {
      text << "ok 1\nresidual_size " << res.report.residual_size << "\nmaximal "
           << (res.report.maximal ? 1 : 0) << '\n';
    } else {
      text << "ok 0\nfail_index " << res.fail_index << "\nreason " << res.reason << '\n';
    }
    sink.write(text.str());
    return res.ok ? 0 : 1;
  }

  if (*bound) {
    Graph g = load_graph(bound_in);
    CapacityVector phi = capacity_vector(g);
    std::vector<std::int64_t> sorted(phi.begin(), phi.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    auto top = [&](int k) {
      std::int64_t s = 0;
      for (int i = 0; i < k && i < static_cast<int>(sorted.size()); ++i) s += sorted[i];
      return s;
    };
    const int certified = certified_lower_bound(g);
    int ll_count = -1, ll_certified = 0;
    if (is_tree(g)) {
      auto b = long_leaf_lower_bound(g);
      ll_count = b.count;
      ll_certified = b.certified ? 1 : 0;
    }
    std::ostringstream text;
    if (format == "json") {
      nlohmann::ordered_json j;
      j["n"] = g.vertex_count();
      j["m"] = g.edge_count();
      j["phi_max"] = sorted.empty() ? 0 : sorted.front();
      j["top1"] = top(1);
      j["top2"] = top(2);
      j["top3"] = top(3);
      j["certified_k"] = certified;
      j["long_leaves"] = ll_count;
      j["long_leaf_certified"] = ll_certified != 0;
      text << j.dump() << '\n';
    } else {
      text << "n,m,phi_max,top1,top2,top3,certified_k,long_leaves,long_leaf_certified\n"
           << g.vertex_count() << ',' << g.edge_count() << ','
           << (sorted.empty() ? 0 : sorted.front()) << ',' << top(1) << ',' << top(2)
           << ',' << top(3) << ',' << certified << ',' << ll_count << ',' << ll_certified
           << '\n';
    }
    sink.write(text.str());
    return 0;
  }

  if (*ct_build) {
    auto params = make_params(ct_n, ct_eps, ct_sigma, ct_alpha, ct_beta);
    auto table = calibrate(params);
    CutoffTree t = build_tree(table, params.sigma);
    if (ct_pruned) t = prune_bereft(t);
    std::ostringstream text;
    write_tree(t, text);
    sink.write(text.str());
    std::cerr << "m " << table.m << " rho_m " << table.rho_m() << " b_m " << table.b_m()
              << " size " << t.size() << '\n';
    return 0;
  }

  if (*ct_check) {
    std::ifstream f(ct_in);
    if (!f) throw std::runtime_error("cannot open tree file: " + ct_in);
    CutoffTree t = read_tree(f);
    int bereft = 0;
    for (const auto& node : t.nodes) bereft += node.bereft ? 1 : 0;
    std::ostringstream text;
    text << "nodes " << t.size() << '\n'
         << "bereft " << bereft << '\n'
         << "cutoff " << (check_cutoff(t) ? 1 : 0) << '\n'
         << "absorbable " << (check_absorbable(t) ? 1 : 0) << '\n';
    sink.write(text.str());
    return 0;
  }

  if (*ct_proto) {
    std::ifstream f(ct_in);
    if (!f) throw std::runtime_error("cannot open tree file: " + ct_in);
    CutoffTree t = read_tree(f);
    std::vector<Vertex> identity(t.size());
    for (int i = 0; i < t.size(); ++i) identity[i] = i;
    Protocol proto = extract_protocol(t, identity);
    auto replay = verify_protocol(tree_as_graph(t), proto);
    if (!replay.ok || replay.report.residual_size != 1)
      throw std::runtime_error("tree protocol failed to replay to the root");
    std::ostringstream text;
    write_protocol(proto, text);
    sink.write(text.str());
    return 0;
  }

  if (*pl_single || *pl_multi) {
    if (pl_p < 0.0 && pl_mult < 0.0)
      throw CLI::ValidationError("pipeline", "one of --p or --p-mult is required");
    const double p = pl_p >= 0.0 ? pl_p : std::min(1.0, pl_mult * threshold_p(pl_n));
    const double derived_mult = p * pl_n / std::log2(static_cast<double>(pl_n));
    const double eps = pl_eps > 0.0 ? pl_eps : std::max(0.1, derived_mult - 1.0);
    auto params = make_params(pl_n, eps, pl_sigma, pl_alpha, pl_beta);
    RandomSource rng(seed);
    std::string json;
    const Protocol* witness = nullptr;
    PipelineReport single_rep;
    MultiRootReport multi_rep;
    if (*pl_single) {
      single_rep = witness_pipeline(pl_n, p, params, rng);
      json = single_rep.to_json();
      witness = &single_rep.witness;
    } else {
      const double c = pl_c > 0.0 ? pl_c : derived_mult * 0.6931471805599453;
      multi_rep = multi_root_pipeline(pl_n, p, c, params, rng);
      json = multi_rep.to_json();
      witness = &multi_rep.base.witness;
    }
    if (!pl_witness_out.empty() && !witness->empty()) {
      std::ofstream f(pl_witness_out);
      if (!f) throw std::runtime_error("cannot open witness file: " + pl_witness_out);
      write_protocol(*witness, f);
    }
    sink.write(json + "\n");
    return 0;
  }

  if (*sweep) {
    cfg.base_seed = seed;
    auto rows = run_sweep(cfg);
    std::ostringstream text;
    if (format == "json") {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["n"] = r.n;
        j["p"] = r.p;
        j["multiplier"] = r.multiplier;
        j["trials"] = r.trials;
        j["witness_rate"] = r.witness_rate;
        j["certified_ge2_rate"] = r.certified_ge2_rate;
        j["mean_residual_bound"] = r.mean_residual_bound;
        j["mean_runtime_ms"] = r.mean_runtime_ms;
        arr.push_back(std::move(j));
      }
      text << arr.dump() << '\n';
    } else {
      write_sweep_csv(rows, text);
    }
    sink.write(text.str());
    return 0;
  }

  if (*treestats) {
    auto row = run_tree_stats(ts_n, ts_trials, seed);
    std::ostringstream text;
    if (format == "json") {
      nlohmann::ordered_json j;
      j["n"] = row.n;
      j["trials"] = row.trials;
      j["mean_fraction"] = row.mean_fraction;
      j["sample_variance"] = row.sample_variance;
      j["ref_density"] = row.ref_density;
      j["deviation"] = row.deviation;
      j["frac_ge_bound"] = row.frac_ge_bound;
      text << j.dump() << '\n';
    } else {
      write_tree_stats_csv(row, text);
    }
    sink.write(text.str());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
