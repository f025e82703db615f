#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "acq/engine.hpp"
#include "acq/graph.hpp"

namespace acq {

// Constants steering the recursive tree construction. Levels are counted
// from the bottom: level-j child counts are capped by c_j, which is
// ceil(beta log n) in the bottom regime (j <= alpha log n / log log n) and
// ceil((1+eps/2)/log 2 * log n) above it.
struct ParamSet {
  int n = 0;
  double eps = 0.0;
  int sigma = 1;
  double alpha = 0.04;
  double beta = 0.14;

  // Expected-degree scale (1+eps)/log 2 * log n of the intended regime.
  double expected_degree() const;

  // Validates: n >= 2, eps > 0, sigma >= 1, beta < 1/(10 log 2),
  // 0 < alpha < beta log 2 / 2. sigma <= 0 requests the default
  // ceil(4/eps^2).
  static ParamSet make(int n, double eps, int sigma = -1, double alpha = 0.04,
                       double beta = 0.14);
};

// ceil(log2(x - sigma)) for x > sigma, else 0. Exact integer arithmetic.
int i_star(std::int64_t x, int sigma);

int base_cap(const ParamSet& params, int level_j);

struct SequenceDegenerateError : std::runtime_error {
  explicit SequenceDegenerateError(int level_j);
  int level;
};

struct CalibrationDivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstructionError : std::runtime_error {
  ConstructionError(std::int64_t w, std::int64_t cap, int level);
  std::int64_t weight, cap;
  int level;
};

struct Sequences {
  std::vector<std::int64_t> rho;  // rho[j-1] = weight of a loose level-j vertex
  std::vector<std::int64_t> b;    // b[j-1] = bottom single-leaf count below it
  std::vector<int> istar;         // istar[j-1] = i_star(rho_j)
};

// rho_1 = 2, b_1 = 1, then
//   rho_{j+1} = sigma + 2^{i*(rho_j)} + (c_j - i*(rho_j) - sigma) * rho_j
//   b_{j+1}   = (c_j - i*(rho_j) - sigma) * b_j
// Throws SequenceDegenerateError(j) when c_j - i*(rho_j) - sigma < 1.
Sequences extend_sequences(std::span<const std::int64_t> caps, int sigma);

// Largest m with rho*_m <= (8/5) n under the base caps. Steps whose cap
// falls below the well-definedness floor i* + sigma + 1 are extended at
// that floor (the calibration pass raises such caps for real), so the
// extension is total and this never throws.
int choose_depth(const ParamSet& params);

struct SequenceTable {
  int m = 0;
  std::vector<std::int64_t> c_star;  // c*_1..c*_m
  std::vector<std::int64_t> c;       // calibrated c_1..c_m (c_m never moves)
  std::vector<std::int64_t> rho;     // rho_1..rho_m
  std::vector<std::int64_t> b;       // b_1..b_m
  std::vector<int> istar;            // i*(rho_1)..i*(rho_{m-1})
  int last_increment = 0;            // index of the final +1, 0 if none

  std::int64_t rho_m() const { return rho.back(); }
  std::int64_t b_m() const { return b.back(); }
};

// Round-robin single increments over c_1..c_{m-1}, smallest index first,
// stopping at the first table with rho_m >= (8/5) n; undoing the final
// increment leaves rho_m < (8/5) n (or not well defined). Each c_j may
// grow to at most 2 c*_j. Depths are tried from the bare-sequence depth
// upward until one admits such a table; if none does, throws
// CalibrationDivergedError.
SequenceTable calibrate(const ParamSet& params);

// Assembles a table directly from explicit caps c_1..c_{m-1} (m = size+1);
// used for hand-sized tables and tests.
SequenceTable table_from_caps(std::span<const std::int64_t> caps, int sigma);

enum class NodeRole { root, exact, loose, leaf };

const char* role_name(NodeRole r);

struct CutoffNode {
  int id = 0;
  int parent = -1;
  std::vector<int> children;  // construction order
  std::int64_t weight = 0;    // subtree vertex count
  int level = 0;              // distance from the bottom
  NodeRole role = NodeRole::leaf;
  bool bereft = false;
};

struct CutoffTree {
  std::vector<CutoffNode> nodes;  // ids in construction (preorder) order
  int root = 0;
  int size() const { return static_cast<int>(nodes.size()); }
};

// Builds the abstract tree for the table: a loose level-(j+1) node gets
// i*(rho_j) exact children of weights 2^0..2^{i*-1}, sigma leaves, and
// c_j - i*(rho_j) - sigma loose children of weight rho_j, in that order;
// a loose level-1 node gets one leaf. Exact subtrees of weight w under
// cap c leaf out when w <= c and otherwise split off the minimal exact
// prefix, sigma leaves, and a near-equal remainder (floor/ceil parts).
CutoffTree build_tree(const SequenceTable& table, int sigma);

// Removes the bottom-level leaf under every loose level-1 node and marks
// that node bereft; subtree weights are recomputed.
CutoffTree prune_bereft(const CutoffTree& t);

// Ordered-children condition: some i' has |T_i| = 2^{i-1} for i <= i' and
// |T_i| <= 2^{i'} for i > i' at every internal node.
bool check_cutoff(const CutoffTree& t);

// Sorted-children condition w_i <= 1 + sum_{j<i} w_j at every internal
// node; certifies that the root can absorb the whole tree.
bool check_absorbable(const CutoffTree& t);

// Bottom-up absorption order: each node's children send to it in ascending
// subtree-weight order (ties by construction order). extra_weight, when
// given, adds per-node weight already delivered from outside the tree
// (matched partners of bereft nodes). Verifies legality as it goes.
Protocol extract_protocol(const CutoffTree& t, std::span<const Vertex> embedding,
                          std::span<const std::int64_t> extra_weight = {});

// Fixed two-level absorbable tree on roughly n/2 vertices: with
// j = ceil(sqrt(n/2)) and i maximal with 2^i <= j, the root has children
// v_0..v_{i+j}; v_0 is a leaf, v_l has 2^l - 1 leaves for l <= i, and the
// remaining j children have j leaves each.
CutoffTree warmup_tree(int n);

// Tree edges as a Graph over node ids (for protocol replay).
Graph tree_as_graph(const CutoffTree& t);

// Line format: "id parent weight level role bereft", root first, children
// in construction order; round-trip stable.
void write_tree(const CutoffTree& t, std::ostream& out);
CutoffTree read_tree(std::istream& in);

}  // namespace acq
