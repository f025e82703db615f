#pragma once

#include <cstdint>
#include <vector>

#include "acq/graph.hpp"

namespace acq {

// phi[v] is a sound upper bound on the weight v can ever hold: 2^deg(v)
// capped at n, refined to the fixed point of phi(v) <= 1 + sum of the
// neighbors' phi (an emptied vertex never receives again).
using CapacityVector = std::vector<std::int64_t>;

CapacityVector capacity_vector(const Graph& g);

// Smallest k such that the k largest phi values sum to at least n;
// always <= a_t(g).
int certified_lower_bound(const Graph& g);

// Induced path v-w-x-y with deg(v)=1, deg(w)=deg(x)=2 in the host tree.
struct LongLeaf {
  Vertex v, w, x, y;
};

// Enumerates long leaves of a tree, keyed by the degree-1 endpoint.
std::vector<LongLeaf> long_leaves(const Graph& tree);

struct LongLeafBound {
  int count = 0;
  // The count certifies a_t >= count only for trees on n >= 6 vertices,
  // where the {v,w,x} triples of distinct long leaves are pairwise
  // disjoint. Smaller trees get the count flagged advisory.
  bool certified = false;
};

LongLeafBound long_leaf_lower_bound(const Graph& tree);

struct StructuralCheck {
  bool degree_ok = false;  // max degree < 4 log n
  bool path_ok = false;    // no gamma-vertex path of degree >= (c+eps') log n
  int gamma = 0;
};

StructuralCheck check_structural(const Graph& g, double c, double eps_prime);

}  // namespace acq
