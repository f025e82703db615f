#include <cmath>
#include <stdexcept>

#include "acq/bounds.hpp"
#include "acq/engine.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace acq;
using namespace acq::test;

TEST_SUITE_BEGIN("bounds");

TEST_CASE("capacity vector hand values") {
  CHECK(capacity_vector(Graph(1)) == CapacityVector{1});
  CHECK(capacity_vector(complete_graph(2)) == CapacityVector{2, 2});
  CHECK(capacity_vector(path_graph(6)) == CapacityVector{2, 4, 4, 4, 4, 2});
}

TEST_CASE("capacity vector is an idempotent fixed point") {
  RandomSource rng(8);
  for (int i = 0; i < 30; ++i) {
    Graph g = sample_gnp(12, 0.3, rng);
    CapacityVector phi = capacity_vector(g);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      int d = g.degree(v);
      std::int64_t cap = d >= 62 ? g.vertex_count() : std::int64_t{1} << d;
      CHECK(phi[v] <= std::min<std::int64_t>(cap, g.vertex_count()));
      std::int64_t nb = 1;
      for (Vertex u : g.neighbors(v)) nb += phi[u];
      CHECK(phi[v] <= nb);
    }
  }
}

TEST_CASE("capacity vector dominates every reachable weight") {
  RandomSource rng(17);
  for (const auto& t : all_labeled_trees(5)) {
    auto phi = capacity_vector(t);
    auto exploration = explore_states(t);
    for (Vertex v = 0; v < t.vertex_count(); ++v)
      CHECK(exploration.max_weight_seen[v] <= phi[v]);
  }
  for (int i = 0; i < 40; ++i) {
    const int n = 4 + static_cast<int>(rng.below(4));
    Graph g = sample_gnp(n, 0.5, rng);
    auto phi = capacity_vector(g);
    auto exploration = explore_states(g);
    for (Vertex v = 0; v < n; ++v)
      CHECK(exploration.max_weight_seen[v] <= phi[v]);
  }
}

TEST_CASE("certified lower bound hand values") {
  CHECK(certified_lower_bound(complete_graph(6)) == 1);
  Graph two_edges = Graph::from_edges(4, {{0, 1}, {2, 3}});
  CHECK(capacity_vector(two_edges) == CapacityVector{2, 2, 2, 2});
  CHECK(certified_lower_bound(two_edges) == 2);
  CHECK(certified_lower_bound(path_graph(6)) == 2);
  CHECK(certified_lower_bound(Graph(0)) == 0);
  CHECK(certified_lower_bound(Graph(1)) == 1);
}

TEST_CASE("certified bound never exceeds the exact value") {
  RandomSource rng(23);
  for (int i = 0; i < 50; ++i) {
    const int n = 3 + static_cast<int>(rng.below(5));
    Graph g = random_connected_graph(n, 0.4, rng);
    CHECK(certified_lower_bound(g) <= exact_at(g).value);
  }
}

TEST_CASE("long leaves enumeration") {
  auto p6 = long_leaves(path_graph(6));
  CHECK(p6.size() == 2);

  CHECK(long_leaves(star_graph(5)).empty());

  // spider: three legs of length 3 from center 0
  Graph spider = Graph::from_edges(
      10, {{0, 1}, {1, 2}, {2, 3}, {0, 4}, {4, 5}, {5, 6}, {0, 7}, {7, 8}, {8, 9}});
  auto legs = long_leaves(spider);
  CHECK(legs.size() == 3);

  // P4 still has two long leaves (v-w-x-y from both ends)
  CHECK(long_leaves(path_graph(4)).size() == 2);

  CHECK_THROWS_AS(long_leaves(complete_graph(4)), std::invalid_argument);
}

TEST_CASE("long leaf triples are disjoint for n >= 6") {
  RandomSource rng(29);
  for (int i = 0; i < 200; ++i) {
    const int n = 6 + static_cast<int>(rng.below(30));
    Graph t = sample_random_tree(n, rng);
    auto leaves = long_leaves(t);
    std::vector<char> used(n, 0);
    for (const auto& L : leaves) {
      for (Vertex v : {L.v, L.w, L.x}) {
        CHECK_FALSE(used[v]);
        used[v] = 1;
      }
    }
  }
}

TEST_CASE("long leaf lower bound") {
  auto p6 = long_leaf_lower_bound(path_graph(6));
  CHECK(p6.count == 2);
  CHECK(p6.certified);
  CHECK(exact_at(path_graph(6)).value == 2);

  // broom: path of length 4 with 3 extra leaves at the far end
  Graph broom = Graph::from_edges(8, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {4, 7}});
  auto b = long_leaf_lower_bound(broom);
  CHECK(b.count == 1);  // only the handle end qualifies
  CHECK(b.certified);

  auto p4 = long_leaf_lower_bound(path_graph(4));
  CHECK(p4.count == 2);
  CHECK_FALSE(p4.certified);  // 2 > a_t(P4) = 1: advisory only below n=6
  CHECK(exact_at(path_graph(4)).value == 1);
}

TEST_CASE("long leaf bound below exact value on small trees") {
  RandomSource rng(37);
  for (int i = 0; i < 80; ++i) {
    const int n = 6 + static_cast<int>(rng.below(2));
    Graph t = sample_random_tree(n, rng);
    auto bound = long_leaf_lower_bound(t);
    REQUIRE(bound.certified);
    CHECK(bound.count <= exact_at(t).value);
  }
}

TEST_CASE("structural checks") {
  auto k = check_structural(Graph(0), 0.5, 0.5);
  CHECK(k.gamma == 24);  // ceil(2*(4*0.5 + 2*0.5)/0.25)
  CHECK(k.degree_ok);
  CHECK(k.path_ok);

  auto empty = check_structural(Graph(50), 0.5, 0.5);
  CHECK(empty.degree_ok);
  CHECK(empty.path_ok);

  CHECK_THROWS_AS(check_structural(Graph(5), 2.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(check_structural(Graph(5), 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("structural checks detect a planted high-degree path") {
  // Path of 12 hubs, each with 7 pendant leaves: every hub has degree >= 8.
  std::vector<std::pair<Vertex, Vertex>> edges;
  int next = 12;
  for (int i = 0; i < 12; ++i) {
    if (i + 1 < 12) edges.emplace_back(i, i + 1);
    for (int l = 0; l < 7; ++l) edges.emplace_back(i, next++);
  }
  Graph g = Graph::from_edges(next, edges);
  auto res = check_structural(g, 0.5, 0.5);  // threshold = log(96) ~ 4.6 -> 5
  CHECK(res.gamma == 24);
  CHECK_FALSE(has_high_degree_path(g, 8, 12) == false);
  CHECK(res.degree_ok);  // max degree 9 < 4 log 96 ~ 18.3
  // gamma = 24 exceeds the hub path, so the check still passes; a direct
  // query at the hub scale finds it.
  CHECK(res.path_ok);
  CHECK(has_high_degree_path(g, 8, 12));
}

TEST_CASE("structural checks pass on sparse random graphs at pilot settings") {
  // p = 0.7 log2(n)/n corresponds to c = 0.7/log 2 ~ 1.01. The degree
  // threshold only thins out at eps' well above 1 for reachable n (the
  // Chernoff exponent eps'^2/(4c+2eps') is tiny otherwise), so the pilot
  // fixed eps' = 1.35: threshold 23, gamma 8.
  const int n = 1 << 14;
  const double p = 0.7 * std::log2(double(n)) / n;
  const double c = 0.7 / std::log(2.0);
  int pass = 0;
  const int seeds = 30;
  for (int s = 0; s < seeds; ++s) {
    RandomSource rng = RandomSource::derived(99, {static_cast<std::uint64_t>(s)});
    Graph g = sample_gnp(n, p, rng);
    auto res = check_structural(g, c, 1.35);
    if (res.degree_ok && res.path_ok) ++pass;
  }
  CHECK(pass >= 27);
}

TEST_SUITE_END();
