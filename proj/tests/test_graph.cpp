#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "acq/graph.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace acq;
using namespace acq::test;

TEST_SUITE_BEGIN("graph");

namespace {

std::set<std::pair<Vertex, Vertex>> edge_set(const Graph& g) {
  auto e = g.edges();
  return {e.begin(), e.end()};
}

void check_invariants(const Graph& g) {
  long long degree_sum = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    auto nb = g.neighbors(v);
    for (std::size_t i = 0; i + 1 < nb.size(); ++i) CHECK(nb[i] < nb[i + 1]);
    for (Vertex w : nb) {
      CHECK(w != v);
      CHECK(g.has_edge(w, v));
    }
    degree_sum += g.degree(v);
  }
  CHECK(degree_sum == 2LL * g.edge_count());
}

}  // namespace

TEST_CASE("gnp degenerate probabilities") {
  RandomSource rng(1);
  Graph empty = sample_gnp(5, 0.0, rng);
  CHECK(empty.vertex_count() == 5);
  CHECK(empty.edge_count() == 0);

  Graph complete = sample_gnp(5, 1.0, rng);
  CHECK(complete.edge_count() == 10);
  check_invariants(complete);
}

TEST_CASE("gnp is reproducible per seed") {
  for (double p : {0.03, 0.4}) {
    RandomSource a(42), b(42), c(43);
    Graph ga = sample_gnp(60, p, a);
    Graph gb = sample_gnp(60, p, b);
    Graph gc = sample_gnp(60, p, c);
    CHECK(edge_set(ga) == edge_set(gb));
    CHECK(edge_set(ga) != edge_set(gc));
    check_invariants(ga);
  }
}

TEST_CASE("gnp edge count concentrates (binomial, 4 sigma)") {
  const int n = 10'000;
  RandomSource rng(7);
  Graph g = sample_gnp(n, 0.5, rng);
  const double pairs = double(n) * (n - 1) / 2;
  const double mean = pairs / 2;
  const double sd = std::sqrt(pairs * 0.25);
  CHECK(std::abs(g.edge_count() - mean) <= 4 * sd);
}

TEST_CASE("sparse sampler matches binomial statistics too") {
  const int n = 3000;
  const double p = 0.003;
  RandomSource rng(11);
  Graph g = sample_gnp(n, p, rng);
  const double pairs = double(n) * (n - 1) / 2;
  const double mean = pairs * p;
  const double sd = std::sqrt(pairs * p * (1 - p));
  CHECK(std::abs(g.edge_count() - mean) <= 4 * sd);
  check_invariants(g);
}

TEST_CASE("gnp rejects bad probabilities") {
  RandomSource rng(1);
  CHECK_THROWS_AS(sample_gnp(5, -0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_gnp(5, 1.1, rng), std::invalid_argument);
}

TEST_CASE("prufer decode hand cases") {
  CHECK_THROWS_AS(prufer_decode({}, 1), std::invalid_argument);

  RandomSource rng(3);
  Graph two = sample_random_tree(2, rng);
  CHECK(two.edge_count() == 1);
  CHECK(two.has_edge(0, 1));

  // (1,1) on four vertices: leaves 0 and 2 attach to 1, then 1-3 closes.
  std::vector<int> seq{1, 1};
  Graph star = prufer_decode(seq, 4);
  CHECK(star.degree(1) == 3);
  CHECK(star.has_edge(0, 1));
  CHECK(star.has_edge(1, 2));
  CHECK(star.has_edge(1, 3));
}

TEST_CASE("prufer decode is a bijection on n=4") {
  auto trees = all_labeled_trees(4);
  CHECK(trees.size() == 16);
  std::set<std::set<std::pair<Vertex, Vertex>>> distinct;
  for (const auto& t : trees) {
    CHECK(is_tree(t));
    distinct.insert(edge_set(t));
  }
  CHECK(distinct.size() == 16);
}

TEST_CASE("random trees are near-uniform over the 16 labeled trees on 4 vertices") {
  const int samples = 20'000;
  std::map<std::set<std::pair<Vertex, Vertex>>, int> freq;
  RandomSource rng(19);
  for (int i = 0; i < samples; ++i) freq[edge_set(sample_random_tree(4, rng))]++;
  CHECK(freq.size() == 16);
  const double expect = samples / 16.0;
  const double sd = std::sqrt(samples * (1.0 / 16) * (15.0 / 16));
  for (auto& [tree, count] : freq) CHECK(std::abs(count - expect) <= 5 * sd);
}

TEST_CASE("random trees are trees") {
  RandomSource rng(5);
  for (int n : {2, 3, 17, 200}) {
    Graph t = sample_random_tree(n, rng);
    CHECK(t.edge_count() == n - 1);
    CHECK(is_connected(t));
    check_invariants(t);
  }
  CHECK_THROWS_AS(sample_random_tree(1, rng), std::invalid_argument);
}

TEST_CASE("max_degree") {
  CHECK(max_degree(complete_graph(5)) == 4);
  CHECK(max_degree(Graph(3)) == 0);
  CHECK(max_degree(path_graph(4)) == 2);
}

TEST_CASE("is_connected") {
  Graph two_edges = Graph::from_edges(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(is_connected(two_edges));
  CHECK(is_connected(complete_graph(3)));
  CHECK(is_connected(Graph(1)));
  CHECK(is_connected(Graph(0)));
  RandomSource rng(2);
  CHECK(is_connected(sample_random_tree(40, rng)));
}

TEST_CASE("high degree path search") {
  CHECK(has_high_degree_path(path_graph(5), 2, 3));        // the middle three
  CHECK_FALSE(has_high_degree_path(star_graph(9), 2, 2));  // only the center
  CHECK(has_high_degree_path(complete_graph(4), 3, 4));    // Hamiltonian path
  CHECK_FALSE(has_high_degree_path(path_graph(5), 3, 1));

  for (int n : {0, 1, 4}) {
    Graph g(n);
    CHECK(has_high_degree_path(g, 0, 1) == (n >= 1));
  }
  CHECK_THROWS_AS(has_high_degree_path(Graph(2), 0, 0), std::invalid_argument);
}

TEST_CASE("edge list round trip, reader accepts any order") {
  RandomSource rng(9);
  Graph g = sample_gnp(25, 0.2, rng);
  std::ostringstream out;
  write_edge_list(g, out);

  std::istringstream in(out.str());
  Graph back = read_edge_list(in);
  CHECK(edge_set(back) == edge_set(g));

  std::istringstream scrambled("3 2\n2 1\n0 2\n");
  Graph h = read_edge_list(scrambled);
  CHECK(h.has_edge(1, 2));
  CHECK(h.has_edge(0, 2));

  // writer emits sorted "u v" with u < v
  std::ostringstream again;
  write_edge_list(h, again);
  CHECK(again.str() == "3 2\n0 2\n1 2\n");
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 5}}), std::invalid_argument);
}

TEST_SUITE_END();
