#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acq/cutoff.hpp"
#include "acq/engine.hpp"
#include "acq/graph.hpp"
#include "acq/random.hpp"

namespace acq {

// Edge-revelation bookkeeping for the embedding. A pair {u,v} counts as
// revealed once either endpoint is exposed while the other is still in the
// untouched pool; exposing a vertex reveals its pairs into the pool of that
// moment. Bereft images are assigned but never exposed, and pool vertices
// are neither, so no pair between the leftover set R and the bereft set B
// is revealed before the matching asks for those edges.
class ExposureOracle {
 public:
  explicit ExposureOracle(const Graph& g)
      : g_(&g), exposed_(g.vertex_count(), 0), assigned_(g.vertex_count(), 0) {}

  // Marks v exposed and returns its neighbors among vertices that are
  // neither exposed nor assigned, ascending.
  std::vector<Vertex> expose(Vertex v);

  void assign(Vertex v) { assigned_[v] = 1; }

  bool exposed(Vertex v) const { return exposed_[v] != 0; }
  bool assigned(Vertex v) const { return assigned_[v] != 0; }
  int exposed_count() const { return exposed_count_; }

  // Criterion for matching independence: every left vertex untouched,
  // every right vertex unexposed.
  bool pairs_unrevealed(std::span<const Vertex> left, std::span<const Vertex> right) const;

  void begin_matching() { matching_phase_ = true; }
  bool matching_started() const { return matching_phase_; }

  // Adjacency query for the matching phase (reveals the pair now).
  bool edge(Vertex u, Vertex v) const { return g_->has_edge(u, v); }

 private:
  const Graph* g_;
  std::vector<char> exposed_, assigned_;
  int exposed_count_ = 0;
  bool matching_phase_ = false;
};

struct Embedding {
  std::vector<Vertex> node_to_vertex;  // -1 where unset
};

struct EmbedStats {
  int bad_max = 0;                 // worst bad-children count at one parent
  std::vector<int> bad_histogram;  // bad_histogram[k] = parents with k bad children
  int internal_nodes = 0;
};

struct EmbedResult {
  bool ok = false;
  Embedding embedding;
  EmbedStats stats;
  std::string fail_stage;  // "root" or "internal"
  int fail_depth = 0;      // distance from the root
};

// Greedy top-down embedding of a pruned tree, level by level. A candidate
// for an internal slot at bottom-level l is bad when it has fewer than
// c_{l-1} neighbors among untouched vertices; bad candidates are demoted
// to childless non-bereft slots of the same parent (at most sigma per
// parent). Bereft and leaf slots consume untouched vertices unexposed.
EmbedResult embed_tree(ExposureOracle& oracle, const CutoffTree& pruned,
                       const SequenceTable& table, int sigma, Vertex root_vertex);

struct MatchResult {
  std::vector<std::pair<Vertex, Vertex>> pairs;  // (left, right)
  std::vector<Vertex> unmatched_left;
};

// Maximum bipartite matching by augmenting paths (Kuhn).
MatchResult max_bipartite_matching(std::span<const Vertex> left, std::span<const Vertex> right,
                                   const Graph& g);

struct PipelineReport {
  std::string outcome;  // "witness" | "embed_failed" | "match_incomplete"
  std::string stage;    // failure stage, empty on success
  int depth = 0;
  int n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  int sigma = 0;
  int levels = 0;      // table depth m
  int tree_size = 0;   // |T'| = rho_m - b_m
  int bad_max = 0;
  int b_size = 0;
  int r_size = 0;
  int matched = 0;
  int unmatched = 0;
  int residual_size = 0;
  bool exposure_clean = false;  // no R x B pair revealed before matching
  bool maximal = false;
  Protocol witness;  // empty unless outcome == "witness" (or multi-root)

  std::string to_json() const;  // flat object, stable key order
};

// Sharp-threshold witness pipeline: calibrate, build and prune the tree,
// embed it, match leftover vertices onto bereft images, then emit the
// protocol (matched sends first, then bottom-up absorption). On success the
// witness replays to a single residual vertex holding weight n.
PipelineReport witness_pipeline(int n, double p, const ParamSet& params, RandomSource& rng);

// Same, on an already-sampled graph.
PipelineReport witness_pipeline_on(const Graph& g, const ParamSet& params, RandomSource& rng,
                                   double p_label, std::uint64_t seed_label);

struct MultiRootReport {
  PipelineReport base;
  std::int64_t upper_bound = 0;
  int trees_requested = 0;
  int trees_embedded = 0;
  int discarded = 0;      // screened-out or unused root candidates
  int failed_assigned = 0;  // vertices stranded in partially embedded trees

  std::string to_json() const;
};

// Sparse-regime upper bound: grows L disjoint copies of the pruned tree
// sized by rho_m <= n^(c-eps), screens 2L candidate roots by degree,
// embeds level-synchronized, then defect-matches leftovers onto bereft
// images. The witness residual is exactly the discarded candidates, the
// roots, the unmatched leftovers, and any stranded vertices.
MultiRootReport multi_root_pipeline(int n, double p, double c, const ParamSet& params,
                                    RandomSource& rng);

}  // namespace acq
