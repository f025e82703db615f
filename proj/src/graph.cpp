#include "acq/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace acq {

Graph Graph::from_edges(int n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  if (n < 0) throw std::invalid_argument("graph: negative vertex count");
  Graph g(n);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("graph: vertex id out of range");
    if (u == v) throw std::invalid_argument("graph: self-loop");
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& list : g.adj_) {
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end())
      throw std::invalid_argument("graph: duplicate edge");
  }
  g.m_ = static_cast<int>(edges.size());
  return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  const auto& list = adj_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(m_);
  for (Vertex u = 0; u < vertex_count(); ++u)
    for (Vertex v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

namespace {

Graph graph_from_pairs(int n, std::vector<std::pair<Vertex, Vertex>>&& edges) {
  return Graph::from_edges(n, edges);
}

}  // namespace

Graph sample_gnp(int n, double p, RandomSource& rng) {
  if (n < 0) throw std::invalid_argument("sample_gnp: negative n");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("sample_gnp: p outside [0,1]");

  std::vector<std::pair<Vertex, Vertex>> edges;
  if (n >= 2 && p > 0.0) {
    const std::uint64_t total = std::uint64_t(n) * std::uint64_t(n - 1) / 2;
    if (p >= 1.0) {
      edges.reserve(total);
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    } else if (p >= 0.1) {
      // Dense regime: one draw per pair, lexicographic order.
      edges.reserve(static_cast<std::size_t>(p * double(total) * 1.05) + 16);
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
          if (rng.next_unit() < p) edges.emplace_back(u, v);
    } else {
      // Sparse regime: geometric jumps over the linearized pair index.
      edges.reserve(static_cast<std::size_t>(p * double(total) * 1.2) + 16);
      const double log_q = std::log1p(-p);
      std::uint64_t idx = 0;
      Vertex row = 0;
      std::uint64_t row_start = 0;  // linear index of pair (row, row+1)
      while (true) {
        const double skip_d = std::floor(std::log1p(-rng.next_unit()) / log_q);
        if (skip_d >= static_cast<double>(total)) break;
        idx += static_cast<std::uint64_t>(skip_d);
        if (idx >= total) break;
        while (idx - row_start >= std::uint64_t(n - 1 - row)) {
          row_start += std::uint64_t(n - 1 - row);
          ++row;
        }
        edges.emplace_back(row, row + 1 + static_cast<Vertex>(idx - row_start));
        ++idx;
      }
    }
  }
  return graph_from_pairs(n, std::move(edges));
}

Graph prufer_decode(std::span<const int> seq, int n) {
  if (n < 2) throw std::invalid_argument("prufer_decode: n < 2");
  if (static_cast<int>(seq.size()) != n - 2)
    throw std::invalid_argument("prufer_decode: sequence length must be n-2");
  std::vector<int> degree(n, 1);
  for (int a : seq) {
    if (a < 0 || a >= n) throw std::invalid_argument("prufer_decode: entry out of range");
    ++degree[a];
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
  for (Vertex v = 0; v < n; ++v)
    if (degree[v] == 1) leaves.push(v);

  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(n - 1);
  for (int a : seq) {
    Vertex leaf = leaves.top();
    leaves.pop();
    edges.emplace_back(std::min(leaf, a), std::max(leaf, a));
    if (--degree[a] == 1) leaves.push(a);
  }
  Vertex u = leaves.top();
  leaves.pop();
  Vertex v = leaves.top();
  edges.emplace_back(std::min(u, v), std::max(u, v));
  return graph_from_pairs(n, std::move(edges));
}

Graph sample_random_tree(int n, RandomSource& rng) {
  if (n < 2) throw std::invalid_argument("sample_random_tree: n < 2");
  std::vector<int> seq(n - 2);
  for (int& a : seq) a = static_cast<int>(rng.below(n));
  return prufer_decode(seq, n);
}

int max_degree(const Graph& g) {
  int best = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) best = std::max(best, g.degree(v));
  return best;
}

bool is_connected(const Graph& g) {
  const int n = g.vertex_count();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (Vertex w : g.neighbors(u))
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  return reached == n;
}

bool is_tree(const Graph& g) {
  return g.edge_count() == g.vertex_count() - 1 && is_connected(g);
}

namespace {

bool path_dfs(const Graph& g, const std::vector<char>& in_set, std::vector<char>& used,
              Vertex u, int remaining) {
  if (remaining == 1) return true;
  for (Vertex w : g.neighbors(u)) {
    if (!in_set[w] || used[w]) continue;
    used[w] = 1;
    if (path_dfs(g, in_set, used, w, remaining - 1)) return true;
    used[w] = 0;
  }
  return false;
}

}  // namespace

bool has_high_degree_path(const Graph& g, int degree_threshold, int path_len) {
  if (path_len < 1) throw std::invalid_argument("has_high_degree_path: path_len < 1");
  const int n = g.vertex_count();
  std::vector<char> in_set(n, 0);
  for (Vertex v = 0; v < n; ++v) in_set[v] = g.degree(v) >= degree_threshold;
  std::vector<char> used(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    if (!in_set[v]) continue;
    if (path_len == 1) return true;
    used[v] = 1;
    if (path_dfs(g, in_set, used, v, path_len)) return true;
    used[v] = 0;
  }
  return false;
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& in) {
  int n = 0, m = 0;
  if (!(in >> n >> m)) throw std::runtime_error("edge list: missing header");
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(m);
  for (int i = 0; i < m; ++i) {
    Vertex u, v;
    if (!(in >> u >> v)) throw std::runtime_error("edge list: truncated");
    edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

}  // namespace acq
