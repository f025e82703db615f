#include "acq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acq {

CapacityVector capacity_vector(const Graph& g) {
  const int n = g.vertex_count();
  CapacityVector phi(n);
  for (Vertex v = 0; v < n; ++v) {
    int d = g.degree(v);
    phi[v] = d >= 62 ? n : std::min<std::int64_t>(n, std::int64_t{1} << d);
    if (phi[v] < 1) phi[v] = 1;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (Vertex v = 0; v < n; ++v) {
      std::int64_t cap = 1;
      for (Vertex u : g.neighbors(v)) cap += phi[u];
      if (cap < phi[v]) {
        phi[v] = cap;
        changed = true;
      }
    }
  }
  return phi;
}

int certified_lower_bound(const Graph& g) {
  const int n = g.vertex_count();
  if (n == 0) return 0;
  CapacityVector phi = capacity_vector(g);
  std::sort(phi.begin(), phi.end(), std::greater<>());
  std::int64_t covered = 0;
  for (int k = 0; k < n; ++k) {
    covered += phi[k];
    if (covered >= n) return k + 1;
  }
  return n;
}

std::vector<LongLeaf> long_leaves(const Graph& tree) {
  if (!is_tree(tree)) throw std::invalid_argument("long_leaves: input is not a tree");
  std::vector<LongLeaf> out;
  for (Vertex v = 0; v < tree.vertex_count(); ++v) {
    if (tree.degree(v) != 1) continue;
    Vertex w = tree.neighbors(v)[0];
    if (tree.degree(w) != 2) continue;
    Vertex x = tree.neighbors(w)[0] == v ? tree.neighbors(w)[1] : tree.neighbors(w)[0];
    if (tree.degree(x) != 2) continue;
    Vertex y = tree.neighbors(x)[0] == w ? tree.neighbors(x)[1] : tree.neighbors(x)[0];
    out.push_back({v, w, x, y});
  }
  return out;
}

LongLeafBound long_leaf_lower_bound(const Graph& tree) {
  LongLeafBound b;
  b.count = static_cast<int>(long_leaves(tree).size());
  b.certified = tree.vertex_count() >= 6;
  return b;
}

StructuralCheck check_structural(const Graph& g, double c, double eps_prime) {
  if (!(c > 0.0 && c < 1.0 / std::log(2.0)))
    throw std::invalid_argument("check_structural: c outside (0, 1/log 2)");
  if (!(eps_prime > 0.0)) throw std::invalid_argument("check_structural: eps_prime <= 0");

  StructuralCheck out;
  out.gamma = static_cast<int>(std::ceil(2.0 * (4.0 * c + 2.0 * eps_prime) /
                                         (eps_prime * eps_prime)));
  const int n = g.vertex_count();
  if (n <= 1) {
    out.degree_ok = true;
    out.path_ok = true;
    return out;
  }
  const double logn = std::log(static_cast<double>(n));
  out.degree_ok = max_degree(g) < 4.0 * logn;
  const int threshold = static_cast<int>(std::ceil((c + eps_prime) * logn - 1e-9));
  out.path_ok = !has_high_degree_path(g, threshold, out.gamma);
  return out;
}

}  // namespace acq
