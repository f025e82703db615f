#include <cmath>
#include <set>

#include "acq/embed.hpp"
#include "acq/experiments.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace acq;
using namespace acq::test;

TEST_SUITE_BEGIN("embed");

namespace {

CutoffTree small_pruned_tree(int sigma = 1) {
  auto table = table_from_caps(std::vector<std::int64_t>{4, 5}, sigma);
  return prune_bereft(build_tree(table, sigma));
}

SequenceTable small_table(int sigma = 1) {
  return table_from_caps(std::vector<std::int64_t>{4, 5}, sigma);
}

}  // namespace

TEST_CASE("embedding into a complete graph always succeeds") {
  auto table = small_table();
  CutoffTree t = small_pruned_tree();  // 14 vertices
  Graph g = complete_graph(20);
  ExposureOracle oracle(g);
  auto res = embed_tree(oracle, t, table, 1, 3);
  REQUIRE(res.ok);

  // injective, edge-preserving
  std::set<Vertex> used;
  for (int id = 0; id < t.size(); ++id) {
    Vertex v = res.embedding.node_to_vertex[id];
    REQUIRE(v >= 0);
    CHECK(used.insert(v).second);
    if (t.nodes[id].parent >= 0)
      CHECK(g.has_edge(v, res.embedding.node_to_vertex[t.nodes[id].parent]));
  }
  CHECK(res.embedding.node_to_vertex[t.root] == 3);

  // bereft images were never exposed
  for (const auto& node : t.nodes)
    if (node.bereft) CHECK_FALSE(oracle.exposed(res.embedding.node_to_vertex[node.id]));
}

TEST_CASE("embedding fails at the root on an empty graph") {
  auto table = small_table();
  CutoffTree t = small_pruned_tree();
  Graph g(30);
  ExposureOracle oracle(g);
  auto res = embed_tree(oracle, t, table, 1, 0);
  CHECK_FALSE(res.ok);
  CHECK(res.fail_stage == "root");
  CHECK(res.fail_depth == 0);
}

TEST_CASE("matching hand cases") {
  {
    Graph g = Graph::from_edges(3, {{0, 1}});  // r=0, b1=1, b2=2
    auto m = max_bipartite_matching(std::vector<Vertex>{0}, std::vector<Vertex>{1, 2}, g);
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.pairs[0] == std::pair<Vertex, Vertex>{0, 1});
    CHECK(m.unmatched_left.empty());
  }
  {
    Graph g = Graph::from_edges(3, {{0, 2}, {1, 2}});  // two lefts, one right
    auto m = max_bipartite_matching(std::vector<Vertex>{0, 1}, std::vector<Vertex>{2}, g);
    CHECK(m.pairs.size() == 1);
    CHECK(m.unmatched_left.size() == 1);
  }
}

TEST_CASE("matching agrees with the max-flow oracle") {
  RandomSource rng(55);
  for (int round = 0; round < 12; ++round) {
    const int nl = 10 + static_cast<int>(rng.below(20));
    const int nr = 10 + static_cast<int>(rng.below(40));
    Graph g = sample_gnp(nl + nr, 0.15, rng);
    std::vector<Vertex> left, right;
    for (int i = 0; i < nl; ++i) left.push_back(i);
    for (int j = 0; j < nr; ++j) right.push_back(nl + j);
    auto kuhn = max_bipartite_matching(left, right, g);
    // only left-right edges count for the oracle: strip the rest
    std::vector<std::pair<Vertex, Vertex>> lr;
    for (int i = 0; i < nl; ++i)
      for (Vertex w : g.neighbors(i))
        if (w >= nl) lr.emplace_back(i, w);
    Graph bip = Graph::from_edges(nl + nr, lr);
    CHECK(static_cast<int>(kuhn.pairs.size()) == matching_size_flow(left, right, bip));
  }
}

TEST_CASE("larger matching instance against the flow oracle") {
  RandomSource rng(56);
  std::vector<Vertex> left, right;
  for (int i = 0; i < 50; ++i) left.push_back(i);
  for (int j = 0; j < 200; ++j) right.push_back(50 + j);
  std::vector<std::pair<Vertex, Vertex>> lr;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 200; ++j)
      if (rng.next_unit() < 0.2) lr.emplace_back(i, 50 + j);
  Graph bip = Graph::from_edges(250, lr);
  auto kuhn = max_bipartite_matching(left, right, bip);
  CHECK(static_cast<int>(kuhn.pairs.size()) == matching_size_flow(left, right, bip));
}

TEST_CASE("witness pipeline succeeds in the dense pilot regime") {
  // Pilot-fixed cell: n=1024, p=0.3, eps=2, sigma=2 embeds 10/10. Pinned
  // with slack at >= 8/10; every witness must replay to a single residual.
  const int n = 1024;
  auto params = ParamSet::make(n, 2.0, 2);
  int wit = 0;
  for (int s = 0; s < 10; ++s) {
    RandomSource rng = RandomSource::derived(5, {30, 20, static_cast<std::uint64_t>(s)});
    auto rep = witness_pipeline(n, 0.3, params, rng);
    if (rep.outcome != "witness") continue;
    ++wit;
    CHECK(rep.residual_size == 1);
    CHECK(rep.exposure_clean);
    CHECK(rep.maximal);
    CHECK(rep.r_size == rep.matched);
    CHECK(rep.bad_max <= params.sigma);  // successful embeds never exceed sigma
    // replay independently
    RandomSource rng2 = RandomSource::derived(5, {30, 20, static_cast<std::uint64_t>(s)});
    Graph g = sample_gnp(n, 0.3, rng2);
    auto check = verify_protocol(g, rep.witness);
    REQUIRE(check.ok);
    CHECK(check.report.residual_size == 1);
    std::int64_t top = 0;
    for (auto w : check.final_weights) top = std::max(top, w);
    CHECK(top == n);  // the single residual vertex holds everything
  }
  CHECK(wit >= 8);
}

TEST_CASE("witness pipeline fails fast near the threshold scale") {
  // At multiplier 1.4 the tree does not embed at this n; outcome must be a
  // structured failure, never a bogus witness.
  const int n = 1024;
  const double p = 1.4 * threshold_p(n);
  auto params = ParamSet::make(n, 0.4, 3);
  for (int s = 0; s < 5; ++s) {
    RandomSource rng = RandomSource::derived(6, {static_cast<std::uint64_t>(s)});
    auto rep = witness_pipeline(n, p, params, rng);
    CHECK(rep.outcome == "embed_failed");
    CHECK(rep.witness.empty());
  }
}

TEST_CASE("pipeline reports are deterministic and JSON-stable") {
  const int n = 512;
  auto params = ParamSet::make(n, 2.0, 2);
  RandomSource a = RandomSource::derived(11, {1});
  RandomSource b = RandomSource::derived(11, {1});
  auto ra = witness_pipeline(n, 0.4, params, a);
  auto rb = witness_pipeline(n, 0.4, params, b);
  CHECK(ra.to_json() == rb.to_json());
  CHECK(ra.to_json().find("\"outcome\"") != std::string::npos);
  CHECK(ra.witness == rb.witness);
}

TEST_CASE("witness rate is nondecreasing in p (pilot grid)") {
  const int n = 1024;
  auto params = ParamSet::make(n, 2.0, 2);
  std::vector<double> ps{0.05, 0.15, 0.25, 0.35, 0.45};
  std::vector<double> rates;
  for (double p : ps) {
    int wit = 0;
    for (int s = 0; s < 8; ++s) {
      RandomSource rng =
          RandomSource::derived(21, {static_cast<std::uint64_t>(p * 1000),
                                     static_cast<std::uint64_t>(s)});
      if (witness_pipeline(n, p, params, rng).outcome == "witness") ++wit;
    }
    rates.push_back(wit / 8.0);
  }
  for (std::size_t i = 1; i < rates.size(); ++i)
    CHECK(rates[i] >= rates[i - 1] - 0.05);  // one small inversion tolerated
}

TEST_CASE("exposure accounting") {
  Graph g = complete_graph(6);
  ExposureOracle oracle(g);
  auto nb = oracle.expose(0);
  CHECK(nb == std::vector<Vertex>{1, 2, 3, 4, 5});
  oracle.assign(0);
  oracle.assign(1);
  auto nb2 = oracle.expose(2);
  CHECK(nb2 == std::vector<Vertex>{3, 4, 5});  // 0 exposed, 1 assigned
  oracle.assign(2);

  std::vector<Vertex> r{4, 5}, b{3};
  CHECK(oracle.pairs_unrevealed(r, b));
  std::vector<Vertex> r_bad{2};
  CHECK_FALSE(oracle.pairs_unrevealed(r_bad, b));
}

TEST_CASE("multi-root pipeline basics") {
  const int n = 1 << 12;
  auto params = ParamSet::make(n, 0.15, 2);
  for (int s = 0; s < 3; ++s) {
    RandomSource rng = RandomSource::derived(31, {static_cast<std::uint64_t>(s)});
    const double p = 0.7 * threshold_p(n);
    auto rep = multi_root_pipeline(n, p, 0.7, params, rng);
    CHECK(rep.upper_bound >= 1);
    CHECK(rep.upper_bound <= n);
    CHECK(rep.base.residual_size == rep.upper_bound);

    // replay the emitted witness independently
    RandomSource rng2 = RandomSource::derived(31, {static_cast<std::uint64_t>(s)});
    Graph g = sample_gnp(n, p, rng2);
    auto check = verify_protocol(g, rep.base.witness);
    REQUIRE(check.ok);
    CHECK(check.report.residual_size == rep.upper_bound);
    CHECK(rep.base.exposure_clean);
  }
}

TEST_CASE("multi-root upper bound beats the trivial residual and respects accounting") {
  // Dense enough that every tree embeds; the residual is then exactly the
  // roots, the screened-out candidates, and the unmatched leftovers.
  const int n = 1 << 12;
  auto params = ParamSet::make(n, 0.15, 2);
  RandomSource rng = RandomSource::derived(33, {0});
  auto rep = multi_root_pipeline(n, 0.05, 0.7, params, rng);
  CHECK(rep.upper_bound == rep.trees_embedded + rep.discarded + rep.base.unmatched +
                               rep.failed_assigned);
  CHECK(rep.trees_embedded == rep.trees_requested);
  CHECK(rep.failed_assigned == 0);
  CHECK(rep.upper_bound < n / 2);  // massively below the no-move residual
  CHECK(rep.base.to_json().find("upper_bound") == std::string::npos);
  CHECK(rep.to_json().find("upper_bound") != std::string::npos);

  RandomSource rng2 = RandomSource::derived(33, {0});
  Graph g = sample_gnp(n, 0.05, rng2);
  auto check = verify_protocol(g, rep.base.witness);
  REQUIRE(check.ok);
  CHECK(check.report.residual_size == rep.upper_bound);
}

TEST_CASE("multi-root accounting stays exact under partial failure") {
  const int n = 1 << 12;
  auto params = ParamSet::make(n, 0.15, 2);
  for (int s = 0; s < 3; ++s) {
    RandomSource rng = RandomSource::derived(34, {static_cast<std::uint64_t>(s)});
    const double p = 0.7 * threshold_p(n);  // sparse: many trees fail here
    auto rep = multi_root_pipeline(n, p, 0.7, params, rng);
    CHECK(rep.upper_bound == rep.trees_embedded + rep.discarded + rep.base.unmatched +
                                 rep.failed_assigned);
  }
}

TEST_SUITE_END();
