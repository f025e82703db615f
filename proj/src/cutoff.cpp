#include "acq/cutoff.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace acq {

namespace {

constexpr double kLog2 = 0.6931471805599453;

std::int64_t checked_mul_add(std::int64_t base, std::int64_t factor, std::int64_t add) {
  __int128 v = static_cast<__int128>(base) * factor + add;
  if (v > std::int64_t{1} << 60) throw std::overflow_error("sequence value overflow");
  return static_cast<std::int64_t>(v);
}

}  // namespace

double ParamSet::expected_degree() const {
  return (1.0 + eps) / kLog2 * std::log(static_cast<double>(n));
}

ParamSet ParamSet::make(int n, double eps, int sigma, double alpha, double beta) {
  ParamSet p;
  p.n = n;
  p.eps = eps;
  p.sigma = sigma < 0 ? static_cast<int>(std::ceil(4.0 / (eps * eps))) : sigma;
  p.alpha = alpha;
  p.beta = beta;
  if (n < 2) throw std::invalid_argument("params: n < 2");
  if (!(eps > 0.0)) throw std::invalid_argument("params: eps <= 0");
  if (p.sigma < 1) throw std::invalid_argument("params: sigma < 1");
  if (!(beta > 0.0 && beta < 1.0 / (10.0 * kLog2)))
    throw std::invalid_argument("params: beta outside (0, 1/(10 log 2))");
  if (!(alpha > 0.0 && alpha < beta * kLog2 / 2.0))
    throw std::invalid_argument("params: alpha outside (0, beta log 2 / 2)");
  return p;
}

int i_star(std::int64_t x, int sigma) {
  if (x < 1) throw std::invalid_argument("i_star: x < 1");
  if (x <= sigma) return 0;
  const std::uint64_t y = static_cast<std::uint64_t>(x - sigma);
  return y == 1 ? 0 : std::bit_width(y - 1);  // ceil(log2 y)
}

int base_cap(const ParamSet& params, int level_j) {
  if (level_j < 1) throw std::invalid_argument("base_cap: level < 1");
  const double logn = std::log(static_cast<double>(params.n));
  bool bottom = false;
  if (params.n >= 3) {
    const double loglogn = std::log(logn);
    if (loglogn > 0.0) bottom = level_j <= params.alpha * logn / loglogn;
  }
  const double value =
      bottom ? params.beta * logn : (1.0 + params.eps / 2.0) / kLog2 * logn;
  return static_cast<int>(std::ceil(value));
}

SequenceDegenerateError::SequenceDegenerateError(int level_j)
    : std::runtime_error("sequence degenerate at level " + std::to_string(level_j) +
                         ": c_j - i*(rho_j) - sigma < 1"),
      level(level_j) {}

ConstructionError::ConstructionError(std::int64_t w, std::int64_t c, int lvl)
    : std::runtime_error("tree construction failed: weight " + std::to_string(w) +
                         " under cap " + std::to_string(c) + " at level " +
                         std::to_string(lvl)),
      weight(w),
      cap(c),
      level(lvl) {}

Sequences extend_sequences(std::span<const std::int64_t> caps, int sigma) {
  if (sigma < 1) throw std::invalid_argument("extend_sequences: sigma < 1");
  Sequences s;
  s.rho.push_back(2);
  s.b.push_back(1);
  for (std::size_t j = 1; j <= caps.size(); ++j) {
    const std::int64_t rho_j = s.rho.back();
    const int ist = i_star(rho_j, sigma);
    const std::int64_t mult = caps[j - 1] - ist - sigma;
    if (mult < 1) throw SequenceDegenerateError(static_cast<int>(j));
    s.istar.push_back(ist);
    s.rho.push_back(checked_mul_add(rho_j, mult, sigma + (std::int64_t{1} << ist)));
    s.b.push_back(checked_mul_add(s.b.back(), mult, 0));
  }
  return s;
}

namespace {

// One extension step with the cap floored at i* + sigma + 1 so the step is
// always defined; strict = false reports whether flooring was needed.
std::int64_t floored_step(std::int64_t rho_j, std::int64_t cap, int sigma, bool* strict) {
  const int ist = i_star(rho_j, sigma);
  std::int64_t mult = cap - ist - sigma;
  if (mult < 1) {
    mult = 1;
    if (strict) *strict = false;
  }
  return checked_mul_add(rho_j, mult, sigma + (std::int64_t{1} << ist));
}

bool within_target(std::int64_t rho, std::int64_t n) {
  return 5 * static_cast<__int128>(rho) <= 8 * static_cast<__int128>(n);
}

}  // namespace

int choose_depth(const ParamSet& params) {
  std::int64_t rho = 2;
  int m = 1;
  while (true) {
    const std::int64_t next = floored_step(rho, base_cap(params, m), params.sigma, nullptr);
    if (!within_target(next, params.n)) return m;
    rho = next;
    ++m;
  }
}

namespace {

// Depth reached by the bare c* sequence before it exceeds the target or
// degenerates; calibration starts its depth search here.
int strict_depth(const ParamSet& params) {
  std::int64_t rho = 2;
  int m = 1;
  while (true) {
    bool strict = true;
    const std::int64_t next = floored_step(rho, base_cap(params, m), params.sigma, &strict);
    if (!strict || !within_target(next, params.n)) return m;
    rho = next;
    ++m;
  }
}

std::optional<std::int64_t> eval_rho_m(std::span<const std::int64_t> caps, int sigma) {
  try {
    return extend_sequences(caps, sigma).rho.back();
  } catch (const SequenceDegenerateError&) {
    return std::nullopt;
  }
}

std::optional<SequenceTable> calibrate_at_depth(const ParamSet& params, int m) {
  SequenceTable t;
  t.m = m;
  for (int j = 1; j <= m; ++j) t.c_star.push_back(base_cap(params, j));
  t.c = t.c_star;

  auto recursion_caps = [&] {
    return std::span<const std::int64_t>(t.c).first(m - 1);
  };
  auto hit_target = [&](std::optional<std::int64_t> rho) {
    return rho && 5 * static_cast<__int128>(*rho) >= 8 * static_cast<__int128>(params.n);
  };

  std::optional<std::int64_t> rho = eval_rho_m(recursion_caps(), params.sigma);
  if (hit_target(rho)) {  // zero-increment fixed point
    auto seq = extend_sequences(recursion_caps(), params.sigma);
    t.rho = std::move(seq.rho);
    t.b = std::move(seq.b);
    t.istar = std::move(seq.istar);
    return t;
  }
  while (true) {
    bool any = false;
    for (int j = 1; j <= m - 1; ++j) {
      if (t.c[j - 1] >= 2 * t.c_star[j - 1]) continue;  // would exceed c*_j * 2
      any = true;
      ++t.c[j - 1];
      rho = eval_rho_m(recursion_caps(), params.sigma);
      if (hit_target(rho)) {
        t.last_increment = j;
        auto seq = extend_sequences(recursion_caps(), params.sigma);
        t.rho = std::move(seq.rho);
        t.b = std::move(seq.b);
        t.istar = std::move(seq.istar);
        return t;
      }
    }
    if (!any) return std::nullopt;  // every term maxed out at this depth
  }
}

}  // namespace

SequenceTable calibrate(const ParamSet& params) {
  const int lo = std::max(2, strict_depth(params));
  const int hi = std::max(lo, choose_depth(params)) + 3;
  for (int m = lo; m <= hi; ++m) {
    if (auto t = calibrate_at_depth(params, m)) return *t;
  }
  throw CalibrationDivergedError(
      "calibration diverged: no depth in [" + std::to_string(lo) + "," +
      std::to_string(hi) + "] reaches (8/5)n within doubled caps");
}

SequenceTable table_from_caps(std::span<const std::int64_t> caps, int sigma) {
  SequenceTable t;
  t.m = static_cast<int>(caps.size()) + 1;
  t.c.assign(caps.begin(), caps.end());
  t.c.push_back(caps.empty() ? 2 : caps.back());  // c_m, unused by the recursion
  t.c_star = t.c;
  auto seq = extend_sequences(caps, sigma);
  t.rho = std::move(seq.rho);
  t.b = std::move(seq.b);
  t.istar = std::move(seq.istar);
  return t;
}

// ---------------------------------------------------------------------------
// Tree construction

const char* role_name(NodeRole r) {
  switch (r) {
    case NodeRole::root: return "root";
    case NodeRole::exact: return "exact";
    case NodeRole::loose: return "loose";
    case NodeRole::leaf: return "leaf";
  }
  return "?";
}

namespace {

struct TreeBuilder {
  const SequenceTable& table;
  int sigma;
  CutoffTree t;

  std::int64_t cap_at(int level) const { return table.c[level - 1]; }

  int add_node(int parent, std::int64_t weight, int level, NodeRole role) {
    const int id = static_cast<int>(t.nodes.size());
    CutoffNode node;
    node.id = id;
    node.parent = parent;
    node.weight = weight;
    node.level = level;
    node.role = role;
    t.nodes.push_back(std::move(node));
    if (parent >= 0) t.nodes[parent].children.push_back(id);
    return id;
  }

  void attach_leaves(int id, std::int64_t count, int level) {
    for (std::int64_t i = 0; i < count; ++i) add_node(id, 1, level, NodeRole::leaf);
  }

  // Subtree of weight w rooted at an exact-construction node.
  void build_exact(int id, std::int64_t w, int level) {
    if (w == 1) return;
    if (level >= 2) {
      const std::int64_t cap = cap_at(level - 1);
      if (w <= cap) {
        attach_leaves(id, w - 1, level - 1);
        return;
      }
      split_exact(id, w, cap, level);
      return;
    }
    // Bottom of the ladder: whatever weight remains becomes leaves.
    attach_leaves(id, w - 1, level - 1);
  }

  void split_exact(int id, std::int64_t w, std::int64_t cap, int level) {
    const std::int64_t max_i = cap - sigma - 1;
    if (max_i < 0) throw ConstructionError(w, cap, level);
    std::int64_t iprime = -1;
    for (std::int64_t i = 0; i <= max_i && i < 62; ++i) {
      const std::int64_t pw = std::int64_t{1} << i;
      if (w - pw - sigma <= (pw + sigma) * (cap - i - sigma)) {
        iprime = i;
        break;
      }
    }
    if (iprime < 0) throw ConstructionError(w, cap, level);
    const std::int64_t m_rest = w - (std::int64_t{1} << iprime) - sigma;
    if (m_rest < 0) throw ConstructionError(w, cap, level);
    const std::int64_t k = cap - iprime - sigma;

    for (std::int64_t e = 0; e < iprime; ++e) {
      const std::int64_t cw = std::int64_t{1} << e;
      int child = add_node(id, cw, level - 1, cw == 1 ? NodeRole::leaf : NodeRole::exact);
      build_exact(child, cw, level - 1);
    }
    attach_leaves(id, sigma, level - 1);
    const std::int64_t hi = m_rest % k;
    const std::int64_t lo_w = m_rest / k;
    for (std::int64_t part = 0; part < k; ++part) {
      const std::int64_t cw = part < hi ? lo_w + 1 : lo_w;
      if (cw == 0) break;
      int child = add_node(id, cw, level - 1, cw == 1 ? NodeRole::leaf : NodeRole::exact);
      build_exact(child, cw, level - 1);
    }
  }

  // Loose node at level j with weight rho_j; children come from the table.
  void build_loose(int id, int j) {
    if (j == 1) {
      attach_leaves(id, 1, 0);  // rho_1 = 2
      return;
    }
    const int ist = table.istar[j - 2];
    const std::int64_t mult = table.c[j - 2] - ist - sigma;
    for (int e = 0; e < ist; ++e) {
      const std::int64_t cw = std::int64_t{1} << e;
      int child = add_node(id, cw, j - 1, cw == 1 ? NodeRole::leaf : NodeRole::exact);
      build_exact(child, cw, j - 1);
    }
    attach_leaves(id, sigma, j - 1);
    for (std::int64_t l = 0; l < mult; ++l) {
      int child = add_node(id, table.rho[j - 2], j - 1, NodeRole::loose);
      build_loose(child, j - 1);
    }
  }
};

std::int64_t verify_weights(const CutoffTree& t, int id) {
  std::int64_t sum = 1;
  for (int c : t.nodes[id].children) sum += verify_weights(t, c);
  if (sum != t.nodes[id].weight)
    throw ConstructionError(t.nodes[id].weight, sum, t.nodes[id].level);
  return sum;
}

}  // namespace

CutoffTree build_tree(const SequenceTable& table, int sigma) {
  if (table.m < 1 || table.rho.empty())
    throw std::invalid_argument("build_tree: empty table");
  TreeBuilder builder{table, sigma, {}};
  builder.add_node(-1, table.rho_m(), table.m, NodeRole::root);
  builder.build_loose(0, table.m);
  CutoffTree t = std::move(builder.t);
  verify_weights(t, t.root);
  return t;
}

CutoffTree prune_bereft(const CutoffTree& t) {
  const int n = t.size();
  std::vector<char> drop(n, 0);
  std::vector<char> mark_bereft(n, 0);
  for (const auto& node : t.nodes) {
    const bool loose_like = node.role == NodeRole::loose || node.role == NodeRole::root;
    if (loose_like && node.level == 1 && !node.children.empty()) {
      if (node.children.size() != 1 || node.weight != 2)
        throw std::invalid_argument("prune_bereft: tree was not produced by build_tree");
      drop[node.children.front()] = 1;
      mark_bereft[node.id] = 1;
    }
  }

  // Rebuild in preorder keeping construction order; weights shrink by the
  // dropped-leaf count of each subtree.
  CutoffTree out;
  std::vector<int> remap(n, -1);
  std::vector<std::int64_t> removed(n, 0);
  // removed counts bottom-up (children have larger ids than parents is NOT
  // guaranteed by preorder, so accumulate by reverse id after a DFS order).
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack{t.root};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    order.push_back(id);
    for (int c : t.nodes[id].children) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int id = *it;
    std::int64_t r = drop[id] ? 1 : 0;
    for (int c : t.nodes[id].children) r += removed[c];
    removed[id] = r;
  }

  struct Frame {
    int old_id;
    int new_parent;
  };
  std::vector<Frame> work{{t.root, -1}};
  while (!work.empty()) {
    auto [old_id, new_parent] = work.back();
    work.pop_back();
    const auto& src = t.nodes[old_id];
    CutoffNode node;
    node.id = static_cast<int>(out.nodes.size());
    node.parent = new_parent;
    node.weight = src.weight - removed[old_id];
    node.level = src.level;
    node.role = src.role;
    node.bereft = mark_bereft[old_id] != 0;
    remap[old_id] = node.id;
    if (new_parent >= 0) out.nodes[new_parent].children.push_back(node.id);
    out.nodes.push_back(std::move(node));
    // Push children in reverse so they pop in construction order.
    const int np = remap[old_id];
    for (auto it = src.children.rbegin(); it != src.children.rend(); ++it)
      if (!drop[*it]) work.push_back({*it, np});
  }
  out.root = 0;
  return out;
}

bool check_cutoff(const CutoffTree& t) {
  for (const auto& node : t.nodes) {
    if (node.children.empty()) continue;
    const int k = static_cast<int>(node.children.size());
    std::vector<std::int64_t> s(k);
    for (int i = 0; i < k; ++i) s[i] = t.nodes[node.children[i]].weight;
    int prefix = 0;
    while (prefix < k && prefix < 62 && s[prefix] == (std::int64_t{1} << prefix)) ++prefix;
    std::vector<std::int64_t> suffix_max(k + 1, 0);
    for (int i = k - 1; i >= 0; --i) suffix_max[i] = std::max(suffix_max[i + 1], s[i]);
    bool ok = false;
    for (int ip = 0; ip <= prefix; ++ip) {
      if (suffix_max[ip] <= (std::int64_t{1} << ip)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

bool check_absorbable(const CutoffTree& t) {
  for (const auto& node : t.nodes) {
    if (node.children.empty()) continue;
    std::vector<std::int64_t> w;
    w.reserve(node.children.size());
    for (int c : node.children) w.push_back(t.nodes[c].weight);
    std::sort(w.begin(), w.end());
    std::int64_t held = 1;
    for (std::int64_t cw : w) {
      if (cw > held) return false;
      held += cw;
    }
  }
  return true;
}

Protocol extract_protocol(const CutoffTree& t, std::span<const Vertex> embedding,
                          std::span<const std::int64_t> extra_weight) {
  if (static_cast<int>(embedding.size()) != t.size())
    throw std::invalid_argument("extract_protocol: embedding size mismatch");
  if (!extra_weight.empty() && static_cast<int>(extra_weight.size()) != t.size())
    throw std::invalid_argument("extract_protocol: extra_weight size mismatch");

  std::vector<std::int64_t> realized(t.size(), 0);
  std::vector<int> order;
  order.reserve(t.size());
  std::vector<int> stack{t.root};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    order.push_back(id);
    for (int c : t.nodes[id].children) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int id = *it;
    std::int64_t w = 1 + (extra_weight.empty() ? 0 : extra_weight[id]);
    for (int c : t.nodes[id].children) w += realized[c];
    realized[id] = w;
  }

  Protocol proto;
  proto.reserve(t.size() - 1);
  // emit(v): absorb children in ascending realized order, recursing first.
  struct Emitter {
    const CutoffTree& t;
    const std::vector<std::int64_t>& realized;
    std::span<const Vertex> emb;
    std::span<const std::int64_t> extra;
    Protocol& proto;

    void emit(int id) {
      const auto& node = t.nodes[id];
      std::vector<int> kids(node.children);
      std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
        return realized[a] < realized[b];
      });
      std::int64_t held = 1 + (extra.empty() ? 0 : extra[id]);
      for (int c : kids) {
        emit(c);
        if (realized[c] > held)
          throw std::logic_error("extract_protocol: absorption order not legal");
        proto.push_back({emb[c], emb[id]});
        held += realized[c];
      }
    }
  } emitter{t, realized, embedding, extra_weight, proto};
  emitter.emit(t.root);
  return proto;
}

CutoffTree warmup_tree(int n) {
  if (n < 8) throw std::invalid_argument("warmup_tree: n < 8");
  const int j = static_cast<int>(std::ceil(std::sqrt(n / 2.0)));
  int i = 0;
  while ((1 << (i + 1)) <= j) ++i;

  CutoffTree t;
  auto add = [&](int parent, std::int64_t weight, int level, NodeRole role) {
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.push_back({id, parent, {}, weight, level, role, false});
    if (parent >= 0) t.nodes[parent].children.push_back(id);
    return id;
  };

  const std::int64_t total =
      1 + (1 + i + j) + ((std::int64_t{1} << (i + 1)) - 2 - i) + std::int64_t{j} * j;
  int root = add(-1, total, 2, NodeRole::root);
  add(root, 1, 1, NodeRole::leaf);  // v_0
  for (int l = 1; l <= i; ++l) {
    int v = add(root, std::int64_t{1} << l, 1, NodeRole::exact);
    for (int c = 1; c < (1 << l); ++c) add(v, 1, 0, NodeRole::leaf);
  }
  for (int r = 0; r < j; ++r) {
    int v = add(root, j + 1, 1, NodeRole::loose);
    for (int c = 0; c < j; ++c) add(v, 1, 0, NodeRole::leaf);
  }
  verify_weights(t, root);
  return t;
}

Graph tree_as_graph(const CutoffTree& t) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(t.size() - 1);
  for (const auto& node : t.nodes)
    if (node.parent >= 0) edges.emplace_back(node.parent, node.id);
  return Graph::from_edges(t.size(), edges);
}

void write_tree(const CutoffTree& t, std::ostream& out) {
  for (const auto& node : t.nodes)
    out << node.id << ' ' << node.parent << ' ' << node.weight << ' ' << node.level
        << ' ' << role_name(node.role) << ' ' << (node.bereft ? 1 : 0) << '\n';
}

CutoffTree read_tree(std::istream& in) {
  CutoffTree t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    CutoffNode node;
    std::string role;
    int bereft = 0;
    if (!(ls >> node.id >> node.parent >> node.weight >> node.level >> role >> bereft))
      throw std::runtime_error("tree file: malformed line: " + line);
    if (role == "root") node.role = NodeRole::root;
    else if (role == "exact") node.role = NodeRole::exact;
    else if (role == "loose") node.role = NodeRole::loose;
    else if (role == "leaf") node.role = NodeRole::leaf;
    else throw std::runtime_error("tree file: unknown role " + role);
    node.bereft = bereft != 0;
    if (node.id != static_cast<int>(t.nodes.size()))
      throw std::runtime_error("tree file: ids must be consecutive from 0");
    t.nodes.push_back(std::move(node));
  }
  if (t.nodes.empty()) throw std::runtime_error("tree file: empty");
  if (t.nodes[0].parent != -1) throw std::runtime_error("tree file: first row must be the root");
  for (const auto& node : t.nodes) {
    if (node.parent >= 0) {
      if (node.parent >= node.id) throw std::runtime_error("tree file: parent after child");
      t.nodes[node.parent].children.push_back(node.id);
    }
  }
  t.root = 0;
  return t;
}

}  // namespace acq
