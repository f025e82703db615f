#include "acq/embed.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "json.hpp"

namespace acq {

std::vector<Vertex> ExposureOracle::expose(Vertex v) {
  exposed_[v] = 1;
  ++exposed_count_;
  std::vector<Vertex> out;
  for (Vertex w : g_->neighbors(v))
    if (!exposed_[w] && !assigned_[w]) out.push_back(w);
  return out;
}

bool ExposureOracle::pairs_unrevealed(std::span<const Vertex> left,
                                      std::span<const Vertex> right) const {
  for (Vertex r : left)
    if (exposed_[r] || assigned_[r]) return false;
  for (Vertex b : right)
    if (exposed_[b]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Embedding

namespace {

// One tree being embedded; the driver interleaves several per level.
struct EmbedJob {
  const CutoffTree* t = nullptr;
  const SequenceTable* table = nullptr;
  int sigma = 0;

  std::vector<Vertex> image;                 // node id -> graph vertex
  std::vector<std::vector<Vertex>> stored;   // candidates recorded at exposure
  std::vector<int> depth;                    // node id -> distance from root
  std::vector<std::vector<int>> by_depth;    // internal nodes per depth
  EmbedStats stats;
  bool failed = false;
  std::string fail_stage;
  int fail_depth = 0;

  void prepare(const CutoffTree& tree, const SequenceTable& tab, int sig) {
    t = &tree;
    table = &tab;
    sigma = sig;
    image.assign(tree.size(), -1);
    stored.assign(tree.size(), {});
    depth.assign(tree.size(), 0);
    std::vector<int> stack{tree.root};
    int max_depth = 0;
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      for (int c : tree.nodes[id].children) {
        depth[c] = depth[id] + 1;
        max_depth = std::max(max_depth, depth[c]);
        stack.push_back(c);
      }
    }
    by_depth.assign(max_depth + 1, {});
    for (const auto& node : tree.nodes)
      if (!node.children.empty()) by_depth[depth[node.id]].push_back(node.id);
    for (auto& level : by_depth) std::sort(level.begin(), level.end());
    stats.bad_histogram.assign(sigma + 2, 0);
  }

  int max_parent_depth() const { return static_cast<int>(by_depth.size()) - 1; }

  // Unexposed-neighbor requirement of a slot at bottom-level l: the cap
  // c_{l-1} its own children live under, or the actual child count where
  // no cap is defined (bottom-most internal nodes of exact subtrees).
  int required(int node_id) const {
    const auto& node = t->nodes[node_id];
    if (node.children.empty()) return 0;
    const int idx = node.level - 2;
    if (idx >= 0 && idx < static_cast<int>(table->c.size()))
      return static_cast<int>(table->c[idx]);
    return static_cast<int>(node.children.size());
  }

  bool fail(const std::string& stage, int d) {
    failed = true;
    fail_stage = stage;
    fail_depth = d;
    return false;
  }

  bool place_root(ExposureOracle& oracle, Vertex root_vertex) {
    const int root = t->root;
    auto cand = oracle.expose(root_vertex);
    const int req = std::max<int>(required(root),
                                  static_cast<int>(t->nodes[root].children.size()));
    if (static_cast<int>(cand.size()) < req) return fail("root", 0);
    oracle.assign(root_vertex);
    image[root] = root_vertex;
    stored[root] = std::move(cand);
    return true;
  }

  bool process_parent(ExposureOracle& oracle, int x) {
    const auto& node = t->nodes[x];
    const int kid_depth = depth[x] + 1;
    ++stats.internal_nodes;

    std::vector<Vertex> cand;
    cand.reserve(stored[x].size());
    for (Vertex z : stored[x])
      if (!oracle.exposed(z) && !oracle.assigned(z)) cand.push_back(z);
    stored[x].clear();
    stored[x].shrink_to_fit();

    if (cand.size() < node.children.size()) return fail("internal", kid_depth);

    std::vector<int> internal_kids, leaf_slots, bereft_slots;
    for (int c : node.children) {
      const auto& kid = t->nodes[c];
      if (!kid.children.empty()) internal_kids.push_back(c);
      else if (kid.bereft) bereft_slots.push_back(c);
      else leaf_slots.push_back(c);
    }

    std::size_t cursor = 0;
    std::size_t leaf_used = 0;
    int bad_count = 0;
    for (int kid : internal_kids) {
      const int req = required(kid);
      while (true) {
        if (cursor == cand.size()) return fail("internal", kid_depth);
        Vertex z = cand[cursor++];
        auto zn = oracle.expose(z);
        if (static_cast<int>(zn.size()) < req) {
          ++bad_count;
          if (bad_count > sigma) return fail("internal", kid_depth);
          if (leaf_used == leaf_slots.size()) return fail("internal", kid_depth);
          image[leaf_slots[leaf_used++]] = z;  // demoted to a childless slot
          oracle.assign(z);
          continue;
        }
        image[kid] = z;
        oracle.assign(z);
        stored[kid] = std::move(zn);
        break;
      }
    }
    // Remaining childless slots take untouched candidates, never exposed.
    for (std::size_t s = leaf_used; s < leaf_slots.size(); ++s) {
      if (cursor == cand.size()) return fail("internal", kid_depth);
      Vertex z = cand[cursor++];
      image[leaf_slots[s]] = z;
      oracle.assign(z);
    }
    for (int slot : bereft_slots) {
      if (cursor == cand.size()) return fail("internal", kid_depth);
      Vertex z = cand[cursor++];
      image[slot] = z;
      oracle.assign(z);
    }
    if (bad_count < static_cast<int>(stats.bad_histogram.size()))
      ++stats.bad_histogram[bad_count];
    stats.bad_max = std::max(stats.bad_max, bad_count);
    return true;
  }
};

}  // namespace

EmbedResult embed_tree(ExposureOracle& oracle, const CutoffTree& pruned,
                       const SequenceTable& table, int sigma, Vertex root_vertex) {
  EmbedResult res;
  EmbedJob job;
  job.prepare(pruned, table, sigma);
  if (!job.place_root(oracle, root_vertex)) {
    res.fail_stage = job.fail_stage;
    res.fail_depth = job.fail_depth;
    res.stats = job.stats;
    return res;
  }
  for (int d = 0; d <= job.max_parent_depth() && !job.failed; ++d)
    for (int x : job.by_depth[d]) {
      if (!job.process_parent(oracle, x)) break;
    }
  res.stats = job.stats;
  if (job.failed) {
    res.fail_stage = job.fail_stage;
    res.fail_depth = job.fail_depth;
    return res;
  }
  res.ok = true;
  res.embedding.node_to_vertex = std::move(job.image);
  return res;
}

MatchResult max_bipartite_matching(std::span<const Vertex> left, std::span<const Vertex> right,
                                   const Graph& g) {
  const int n = g.vertex_count();
  std::vector<int> right_idx(n, -1);
  for (std::size_t j = 0; j < right.size(); ++j) right_idx[right[j]] = static_cast<int>(j);

  std::vector<std::vector<int>> adj(left.size());
  for (std::size_t i = 0; i < left.size(); ++i)
    for (Vertex w : g.neighbors(left[i]))
      if (right_idx[w] >= 0) adj[i].push_back(right_idx[w]);

  std::vector<int> match_right(right.size(), -1);
  std::vector<int> match_left(left.size(), -1);
  std::vector<char> visited(right.size(), 0);

  auto augment = [&](auto&& self, int i) -> bool {
    for (int j : adj[i]) {
      if (visited[j]) continue;
      visited[j] = 1;
      if (match_right[j] < 0 || self(self, match_right[j])) {
        match_right[j] = i;
        match_left[i] = j;
        return true;
      }
    }
    return false;
  };

  for (std::size_t i = 0; i < left.size(); ++i) {
    std::fill(visited.begin(), visited.end(), 0);
    augment(augment, static_cast<int>(i));
  }

  MatchResult res;
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (match_left[i] >= 0)
      res.pairs.emplace_back(left[i], right[match_left[i]]);
    else
      res.unmatched_left.push_back(left[i]);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Pipelines

namespace {

std::vector<Vertex> untouched_vertices(const ExposureOracle& oracle, int n) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < n; ++v)
    if (!oracle.exposed(v) && !oracle.assigned(v)) out.push_back(v);
  return out;
}

nlohmann::ordered_json report_json(const PipelineReport& r) {
  nlohmann::ordered_json j;
  j["outcome"] = r.outcome;
  j["stage"] = r.stage;
  j["depth"] = r.depth;
  j["n"] = r.n;
  j["p"] = r.p;
  j["seed"] = r.seed;
  j["sigma"] = r.sigma;
  j["levels"] = r.levels;
  j["tree_size"] = r.tree_size;
  j["bad_max"] = r.bad_max;
  j["B_size"] = r.b_size;
  j["R_size"] = r.r_size;
  j["matched"] = r.matched;
  j["unmatched"] = r.unmatched;
  j["residual_size"] = r.residual_size;
  j["exposure_clean"] = r.exposure_clean;
  j["maximal"] = r.maximal;
  return j;
}

}  // namespace

std::string PipelineReport::to_json() const { return report_json(*this).dump(); }

std::string MultiRootReport::to_json() const {
  nlohmann::ordered_json j = report_json(base);
  j["upper_bound"] = upper_bound;
  j["trees_requested"] = trees_requested;
  j["trees_embedded"] = trees_embedded;
  j["discarded"] = discarded;
  j["failed_assigned"] = failed_assigned;
  return j.dump();
}

PipelineReport witness_pipeline_on(const Graph& g, const ParamSet& params, RandomSource& rng,
                                   double p_label, std::uint64_t seed_label) {
  if (params.n != g.vertex_count())
    throw std::invalid_argument("witness_pipeline: params.n != graph size");
  const int n = g.vertex_count();

  PipelineReport rep;
  rep.n = n;
  rep.p = p_label;
  rep.seed = seed_label;
  rep.sigma = params.sigma;

  SequenceTable table;
  try {
    table = calibrate(params);
  } catch (const CalibrationDivergedError&) {
    rep.outcome = "embed_failed";
    rep.stage = "calibration";
    return rep;
  }
  rep.levels = table.m;

  CutoffTree pruned = prune_bereft(build_tree(table, params.sigma));
  rep.tree_size = pruned.size();
  if (pruned.size() > n) {
    rep.outcome = "embed_failed";  // the pruned tree cannot fit in the graph
    rep.stage = "root";
    return rep;
  }

  ExposureOracle oracle(g);
  const Vertex root_vertex = static_cast<Vertex>(rng.below(n));
  EmbedResult emb = embed_tree(oracle, pruned, table, params.sigma, root_vertex);
  rep.bad_max = emb.stats.bad_max;
  if (!emb.ok) {
    rep.outcome = "embed_failed";
    rep.stage = emb.fail_stage;
    rep.depth = emb.fail_depth;
    return rep;
  }

  std::vector<Vertex> bereft_images;
  std::vector<int> bereft_nodes;
  for (const auto& node : pruned.nodes)
    if (node.bereft) {
      bereft_nodes.push_back(node.id);
      bereft_images.push_back(emb.embedding.node_to_vertex[node.id]);
    }
  std::sort(bereft_images.begin(), bereft_images.end());
  std::vector<Vertex> leftovers = untouched_vertices(oracle, n);

  rep.b_size = static_cast<int>(bereft_images.size());
  rep.r_size = static_cast<int>(leftovers.size());
  rep.exposure_clean = oracle.pairs_unrevealed(leftovers, bereft_images);
  oracle.begin_matching();

  MatchResult match = max_bipartite_matching(leftovers, bereft_images, g);
  rep.matched = static_cast<int>(match.pairs.size());
  rep.unmatched = static_cast<int>(match.unmatched_left.size());
  if (rep.unmatched > 0) {
    rep.outcome = "match_incomplete";
    return rep;
  }

  // Witness: matched leftovers feed their bereft partners, then the tree
  // drains bottom-up into the root.
  std::vector<int> node_of_vertex(n, -1);
  for (int id : bereft_nodes) node_of_vertex[emb.embedding.node_to_vertex[id]] = id;
  std::vector<std::int64_t> extra(pruned.size(), 0);
  Protocol witness;
  witness.reserve(n);
  for (auto [r, b] : match.pairs) {
    witness.push_back({r, b});
    extra[node_of_vertex[b]] = 1;
  }
  Protocol tree_moves = extract_protocol(pruned, emb.embedding.node_to_vertex, extra);
  witness.insert(witness.end(), tree_moves.begin(), tree_moves.end());

  VerifyResult check = verify_protocol(g, witness);
  if (!check.ok || check.report.residual_size != 1 ||
      check.final_weights[emb.embedding.node_to_vertex[pruned.root]] != n)
    throw std::logic_error("witness_pipeline: constructed witness failed to replay");

  rep.outcome = "witness";
  rep.residual_size = 1;
  rep.maximal = check.report.maximal;
  rep.witness = std::move(witness);
  return rep;
}

PipelineReport witness_pipeline(int n, double p, const ParamSet& params, RandomSource& rng) {
  const std::uint64_t seed = rng.seed();
  Graph g = sample_gnp(n, p, rng);
  return witness_pipeline_on(g, params, rng, p, seed);
}

// ---------------------------------------------------------------------------
// Multi-root variant

namespace {

constexpr double kLog2m = 0.6931471805599453;

int cap_multi(int n, double alpha, double beta, double coeff_top, int j) {
  const double logn = std::log(static_cast<double>(n));
  bool bottom = false;
  if (n >= 3) {
    const double loglogn = std::log(logn);
    if (loglogn > 0.0) bottom = j <= alpha * logn / loglogn;
  }
  const double value = bottom ? beta * logn : coeff_top / kLog2m * logn;
  return static_cast<int>(std::ceil(value));
}

}  // namespace

MultiRootReport multi_root_pipeline(int n, double p, double c, const ParamSet& params,
                                    RandomSource& rng) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("multi_root: c outside (0,1)");
  if (!(c - params.eps / 2.0 > 0.0))
    throw std::invalid_argument("multi_root: eps too large for c");

  MultiRootReport rep;
  rep.base.n = n;
  rep.base.p = p;
  rep.base.seed = rng.seed();
  rep.base.sigma = params.sigma;

  Graph g = sample_gnp(n, p, rng);

  // Depth: largest m with rho_m <= n^(c - eps), caps from the sparse-regime
  // coefficient c - eps/2; no calibration, the copy count absorbs slack.
  const double target = std::pow(static_cast<double>(n), c - params.eps);
  std::vector<std::int64_t> caps;
  {
    std::int64_t rho = 2;
    for (int j = 1;; ++j) {
      const std::int64_t cap = cap_multi(n, params.alpha, params.beta, c - params.eps / 2.0, j);
      const int ist = i_star(rho, params.sigma);
      const std::int64_t mult = cap - ist - params.sigma;
      if (mult < 1) break;
      const std::int64_t next = mult * rho + params.sigma + (std::int64_t{1} << ist);
      if (static_cast<double>(next) > target) break;
      caps.push_back(cap);
      rho = next;
    }
  }
  SequenceTable table = table_from_caps(caps, params.sigma);
  rep.base.levels = table.m;

  CutoffTree pruned = prune_bereft(build_tree(table, params.sigma));
  const int tree_size = pruned.size();
  rep.base.tree_size = tree_size;

  std::int64_t want = std::llround(0.8 * n / tree_size);
  std::int64_t fit = std::max<std::int64_t>(1, (9 * std::int64_t{n} / 10) / (tree_size + 2));
  const int copies = static_cast<int>(std::clamp<std::int64_t>(want, 1, fit));
  rep.trees_requested = copies;

  // Candidate roots: 2L distinct vertices, screened by exposed degree.
  std::unordered_set<Vertex> chosen;
  std::vector<Vertex> candidates;
  while (static_cast<int>(candidates.size()) < 2 * copies &&
         static_cast<int>(chosen.size()) < n) {
    Vertex v = static_cast<Vertex>(rng.below(n));
    if (chosen.insert(v).second) candidates.push_back(v);
  }

  // Screen the whole candidate batch first; unused candidates stay exposed
  // and keep their weight to the end.
  ExposureOracle oracle(g);
  std::vector<std::vector<Vertex>> screened;
  screened.reserve(candidates.size());
  for (Vertex cand : candidates) screened.push_back(oracle.expose(cand));

  std::vector<EmbedJob> jobs;
  jobs.reserve(copies);
  const auto root_node = pruned.nodes[pruned.root];
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (static_cast<int>(jobs.size()) == copies) break;
    EmbedJob job;
    job.prepare(pruned, table, params.sigma);
    const int req = std::max<int>(job.required(pruned.root),
                                  static_cast<int>(root_node.children.size()));
    if (static_cast<int>(screened[i].size()) < req) continue;
    oracle.assign(candidates[i]);
    job.image[pruned.root] = candidates[i];
    job.stored[pruned.root] = std::move(screened[i]);
    jobs.push_back(std::move(job));
  }

  // Level-synchronized: all trees finish depth k before depth k+1 starts.
  int max_depth = 0;
  for (const auto& job : jobs) max_depth = std::max(max_depth, job.max_parent_depth());
  for (int d = 0; d <= max_depth; ++d)
    for (auto& job : jobs) {
      if (job.failed || d > job.max_parent_depth()) continue;
      for (int x : job.by_depth[d])
        if (!job.process_parent(oracle, x)) break;
    }

  int embedded_ok = 0;
  std::vector<Vertex> bereft_images;
  for (auto& job : jobs) {
    if (job.failed) {
      // a failed tree strands everything it assigned, root included
      for (Vertex v : job.image)
        if (v >= 0) ++rep.failed_assigned;
      continue;
    }
    ++embedded_ok;
    for (const auto& node : pruned.nodes)
      if (node.bereft) bereft_images.push_back(job.image[node.id]);
  }
  rep.trees_embedded = embedded_ok;
  int bad_max = 0;
  for (const auto& job : jobs) bad_max = std::max(bad_max, job.stats.bad_max);
  rep.base.bad_max = bad_max;

  // Everything exposed but never embedded retains its weight: screened-out
  // or surplus candidates plus bad vertices stranded by a failing parent.
  rep.discarded = 0;
  for (Vertex v = 0; v < n; ++v)
    if (oracle.exposed(v) && !oracle.assigned(v)) ++rep.discarded;

  std::sort(bereft_images.begin(), bereft_images.end());
  std::vector<Vertex> leftovers = untouched_vertices(oracle, n);
  rep.base.b_size = static_cast<int>(bereft_images.size());
  rep.base.r_size = static_cast<int>(leftovers.size());
  rep.base.exposure_clean = oracle.pairs_unrevealed(leftovers, bereft_images);
  oracle.begin_matching();

  MatchResult match = max_bipartite_matching(leftovers, bereft_images, g);
  rep.base.matched = static_cast<int>(match.pairs.size());
  rep.base.unmatched = static_cast<int>(match.unmatched_left.size());

  std::vector<Vertex> fed_vertex(n, 0);
  Protocol witness;
  for (auto [r, b] : match.pairs) {
    witness.push_back({r, b});
    fed_vertex[b] = 1;
  }
  for (auto& job : jobs) {
    if (job.failed) continue;
    std::vector<std::int64_t> extra(pruned.size(), 0);
    for (const auto& node : pruned.nodes)
      if (node.bereft && fed_vertex[job.image[node.id]]) extra[node.id] = 1;
    Protocol tree_moves = extract_protocol(pruned, job.image, extra);
    witness.insert(witness.end(), tree_moves.begin(), tree_moves.end());
  }

  VerifyResult check = verify_protocol(g, witness);
  if (!check.ok) throw std::logic_error("multi_root: constructed witness failed to replay");
  rep.base.residual_size = check.report.residual_size;
  rep.base.maximal = check.report.maximal;
  rep.upper_bound = check.report.residual_size;
  rep.base.outcome = embedded_ok == rep.trees_requested && rep.base.unmatched == 0
                         ? "witness"
                         : (embedded_ok < rep.trees_requested ? "embed_failed"
                                                              : "match_incomplete");
  if (rep.base.outcome == "embed_failed") rep.base.stage = "internal";
  rep.base.witness = std::move(witness);
  return rep;
}

}  // namespace acq
