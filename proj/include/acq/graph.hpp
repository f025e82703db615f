#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acq/random.hpp"

namespace acq {

using Vertex = int;

// Undirected simple graph, vertex ids 0..n-1, sorted adjacency lists.
// Immutable after construction; safe for concurrent reads.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(n) {}

  // Validates: ids in range, no self-loops, no duplicate edges.
  static Graph from_edges(int n, const std::vector<std::pair<Vertex, Vertex>>& edges);

  int vertex_count() const { return static_cast<int>(adj_.size()); }
  int edge_count() const { return m_; }

  std::span<const Vertex> neighbors(Vertex v) const { return adj_[v]; }
  int degree(Vertex v) const { return static_cast<int>(adj_[v].size()); }
  bool has_edge(Vertex u, Vertex v) const;

  // Sorted list of "u v" edges with u < v.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

 private:
  std::vector<std::vector<Vertex>> adj_;
  int m_ = 0;
};

// G(n,p): each of the C(n,2) pairs appears independently with probability p,
// consumed in lexicographic pair order (0,1),(0,2),...,(n-2,n-1). For
// p < 0.1 the sampler advances by geometric jumps over that same order;
// both paths are deterministic functions of (n, p, seed).
Graph sample_gnp(int n, double p, RandomSource& rng);

// Uniform labeled tree on n >= 2 vertices: uniform Prufer sequence, decoded
// with the smallest-label-leaf rule.
Graph sample_random_tree(int n, RandomSource& rng);
Graph prufer_decode(std::span<const int> seq, int n);

int max_degree(const Graph& g);
bool is_connected(const Graph& g);
bool is_tree(const Graph& g);

// True iff the subgraph induced on {v : degree(v) >= degree_threshold}
// contains a simple path on path_len vertices. Exact DFS with backtracking.
bool has_high_degree_path(const Graph& g, int degree_threshold, int path_len);

// Edge-list text format: first line "n m", then m lines "u v" with u < v,
// sorted lexicographically on write; reader accepts any order.
void write_edge_list(const Graph& g, std::ostream& out);
Graph read_edge_list(std::istream& in);

}  // namespace acq
