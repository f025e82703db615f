#include "acq/engine.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "acq/bounds.hpp"

namespace acq {

WeightState all_ones(const Graph& g) {
  return WeightState(g.vertex_count(), 1);
}

std::vector<Move> legal_moves(const Graph& g, const WeightState& s) {
  if (static_cast<int>(s.size()) != g.vertex_count())
    throw std::invalid_argument("legal_moves: state size mismatch");
  std::vector<Move> out;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (s[v] < 1) continue;
    for (Vertex u : g.neighbors(v))
      if (s[u] >= s[v]) out.push_back({v, u});
  }
  return out;  // (from,to)-sorted: v ascending, neighbors sorted
}

bool is_move_legal(const Graph& g, const WeightState& s, Move m, std::string* why) {
  auto fail = [&](const char* r) {
    if (why) *why = r;
    return false;
  };
  const int n = g.vertex_count();
  if (m.from < 0 || m.to < 0 || m.from >= n || m.to >= n) return fail("vertex out of range");
  if (m.from == m.to || !g.has_edge(m.from, m.to)) return fail("non-edge");
  if (s[m.from] < 1) return fail("zero sender");
  if (s[m.to] < s[m.from]) return fail("receiver lighter than sender");
  return true;
}

WeightState apply_move(const Graph& g, const WeightState& s, Move m) {
  std::string why;
  if (!is_move_legal(g, s, m, &why))
    throw std::invalid_argument("apply_move: illegal move (" + why + ")");
  WeightState next = s;
  next[m.to] += next[m.from];
  next[m.from] = 0;
  return next;
}

namespace {

ResidualReport make_report(const Graph& g, const WeightState& s) {
  ResidualReport r;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (s[v] > 0) r.residual.push_back(v);
  r.residual_size = static_cast<int>(r.residual.size());
  r.maximal = legal_moves(g, s).empty();
  return r;
}

}  // namespace

VerifyResult verify_protocol(const Graph& g, const Protocol& p) {
  VerifyResult res;
  WeightState s = all_ones(g);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::string why;
    if (!is_move_legal(g, s, p[i], &why)) {
      res.ok = false;
      res.fail_index = i;
      res.reason = why;
      return res;
    }
    s[p[i].to] += s[p[i].from];
    s[p[i].from] = 0;
  }
  res.ok = true;
  res.report = make_report(g, s);
  res.final_weights = std::move(s);
  return res;
}

bool is_independent_set(const Graph& g, const std::vector<Vertex>& vs) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      if (g.has_edge(vs[i], vs[j])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Exact solver. Reachable states form a DAG (each move zeroes one positive
// vertex), so plain memoized DFS is exhaustive. The memo stores the best
// residual reachable from a state together with the move that attains it;
// witnesses are rebuilt by following that chain.

namespace {

struct StateKey {
  // Packed encoding for n <= 12 (weights <= n < 32, 5 bits each); otherwise
  // a heap vector. Small graphs dominate, so the packed path matters.
  std::uint64_t packed = 0;
  std::vector<std::int64_t> wide;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    if (k.wide.empty()) return std::hash<std::uint64_t>{}(k.packed);
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : k.wide) h = RandomSource::mix(h, static_cast<std::uint64_t>(w));
    return h;
  }
};

StateKey encode(const WeightState& s) {
  StateKey k;
  if (s.size() <= 12) {
    for (std::size_t i = 0; i < s.size(); ++i)
      k.packed |= static_cast<std::uint64_t>(s[i]) << (5 * i);
  } else {
    k.wide = s;
  }
  return k;
}

struct MemoEntry {
  int value;
  Move move;  // move.from == -1 means terminal
};

struct ExactSolver {
  const Graph& g;
  std::uint64_t budget;
  int lower_bound;
  ExactResult result;
  int best = std::numeric_limits<int>::max();
  Protocol best_witness;
  std::vector<Move> stack;
  bool stop = false;     // lower bound attained
  bool aborted = false;  // budget exhausted
  std::unordered_map<StateKey, MemoEntry, StateKeyHash> memo;

  explicit ExactSolver(const Graph& graph, std::uint64_t b, int lb)
      : g(graph), budget(b), lower_bound(lb) {}

  void note_terminal(const WeightState& s) {
    int count = 0;
    for (auto w : s)
      if (w > 0) ++count;
    if (count < best) {
      best = count;
      best_witness = stack;
      if (best <= lower_bound) stop = true;
    }
  }

  // Rebuilds the tail of a witness from memoized moves.
  void adopt_chain(WeightState s, int value) {
    if (value >= best) return;
    best = value;
    best_witness = stack;
    while (true) {
      auto it = memo.find(encode(s));
      if (it == memo.end() || it->second.move.from < 0) break;
      Move m = it->second.move;
      best_witness.push_back(m);
      s[m.to] += s[m.from];
      s[m.from] = 0;
    }
    if (best <= lower_bound) stop = true;
  }

  int dfs(const WeightState& s) {
    if (stop || aborted) return std::numeric_limits<int>::max();
    StateKey key = encode(s);
    if (auto it = memo.find(key); it != memo.end()) {
      adopt_chain(s, it->second.value);
      return it->second.value;
    }
    if (++result.expanded > budget) {
      aborted = true;
      return std::numeric_limits<int>::max();
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      int d = g.degree(v);
      if (d < 62 && s[v] > (std::int64_t{1} << d)) ++result.degree_cap_violations;
    }
    auto moves = legal_moves(g, s);
    if (moves.empty()) {
      note_terminal(s);
      int count = 0;
      for (auto w : s)
        if (w > 0) ++count;
      memo.emplace(std::move(key), MemoEntry{count, Move{-1, -1}});
      return count;
    }
    int sub_best = std::numeric_limits<int>::max();
    Move sub_move{-1, -1};
    for (Move m : moves) {
      WeightState next = s;
      next[m.to] += next[m.from];
      next[m.from] = 0;
      stack.push_back(m);
      int r = dfs(next);
      stack.pop_back();
      if (r < sub_best) {
        sub_best = r;
        sub_move = m;
      }
      if (stop || aborted) return sub_best;  // incomplete: do not memoize
    }
    memo.emplace(std::move(key), MemoEntry{sub_best, sub_move});
    return sub_best;
  }
};

}  // namespace

ExactResult exact_at(const Graph& g, std::uint64_t budget) {
  if (budget == 0) throw std::invalid_argument("exact_at: budget must be positive");
  const int n = g.vertex_count();
  if (n == 0) return ExactResult{0, {}, true, 0, 0};

  // The capacity bound is sound for every terminal state reachable from
  // anywhere, so hitting it ends the search with an exact answer.
  ExactSolver solver(g, budget, certified_lower_bound(g));
  WeightState init = all_ones(g);
  solver.dfs(init);

  ExactResult res = std::move(solver.result);
  res.value = solver.best;
  res.witness = std::move(solver.best_witness);
  res.exact = !solver.aborted;
  return res;
}

GreedyResult greedy_at(const Graph& g, RandomSource& rng, int restarts) {
  GreedyResult best;
  best.upper_bound = std::numeric_limits<int>::max();
  for (int pass = 0; pass <= restarts; ++pass) {
    WeightState s = all_ones(g);
    Protocol proto;
    while (true) {
      auto moves = legal_moves(g, s);
      if (moves.empty()) break;
      std::int64_t top = -1;
      for (Move m : moves) top = std::max(top, s[m.to]);
      std::vector<Move> ties;
      for (Move m : moves)
        if (s[m.to] == top) ties.push_back(m);
      Move pick = pass == 0 ? ties.front() : ties[rng.below(ties.size())];
      s[pick.to] += s[pick.from];
      s[pick.from] = 0;
      proto.push_back(pick);
    }
    int count = 0;
    for (auto w : s)
      if (w > 0) ++count;
    if (count < best.upper_bound) {
      best.upper_bound = count;
      best.witness = std::move(proto);
    }
  }
  return best;
}

void write_protocol(const Protocol& p, std::ostream& out) {
  for (Move m : p) out << m.from << ' ' << m.to << '\n';
}

Protocol read_protocol(std::istream& in) {
  Protocol p;
  Vertex u, v;
  while (in >> u >> v) p.push_back({u, v});
  return p;
}

}  // namespace acq
