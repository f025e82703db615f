#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "acq/graph.hpp"
#include "acq/random.hpp"

namespace acq {

// Per-vertex token counts. Total weight is conserved by legal moves; a
// vertex at weight 0 can never receive again (any sender has weight >= 1).
using WeightState = std::vector<std::int64_t>;

struct Move {
  Vertex from = -1;
  Vertex to = -1;
  bool operator==(const Move&) const = default;
};

// Ordered move list, replayed from the all-ones state.
using Protocol = std::vector<Move>;

struct ResidualReport {
  std::vector<Vertex> residual;  // vertices with positive weight
  int residual_size = 0;
  bool maximal = false;  // no legal move remains
};

WeightState all_ones(const Graph& g);

// Exactly the pairs (from,to) with {from,to} an edge, w(from) >= 1 and
// w(to) >= w(from); sorted by (from,to).
std::vector<Move> legal_moves(const Graph& g, const WeightState& s);

bool is_move_legal(const Graph& g, const WeightState& s, Move m, std::string* why = nullptr);

// Transfers all weight from m.from onto m.to. Throws std::invalid_argument
// naming the violated condition for illegal moves.
WeightState apply_move(const Graph& g, const WeightState& s, Move m);

struct VerifyResult {
  bool ok = false;
  std::size_t fail_index = 0;  // valid when !ok
  std::string reason;
  ResidualReport report;      // valid when ok
  WeightState final_weights;  // valid when ok
};

// Replays from all-ones; fails fast on the first illegal move.
VerifyResult verify_protocol(const Graph& g, const Protocol& p);

struct ExactResult {
  int value = 0;
  Protocol witness;
  bool exact = true;       // false when the node budget ran out
  std::uint64_t expanded = 0;
  std::uint64_t degree_cap_violations = 0;  // states with w(v) > 2^deg(v)
};

// Minimum residual size over all maximal protocols, by exhaustive DFS over
// reachable weight states with memoization (the state graph is acyclic:
// every move zeroes one positive vertex). Aborts early once the certified
// lower bound is attained. Intended for small graphs.
ExactResult exact_at(const Graph& g, std::uint64_t budget = 50'000'000);

struct GreedyResult {
  int upper_bound = 0;
  Protocol witness;
};

// Repeatedly plays the legal move with the heaviest receiver until maximal;
// ties by smallest (from,to) on the first pass, rng-broken on restarts.
GreedyResult greedy_at(const Graph& g, RandomSource& rng, int restarts = 8);

bool is_independent_set(const Graph& g, const std::vector<Vertex>& vs);

// Protocol file format: one move per line, "u v" meaning transfer u -> v.
void write_protocol(const Protocol& p, std::ostream& out);
Protocol read_protocol(std::istream& in);

}  // namespace acq
