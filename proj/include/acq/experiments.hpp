#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "acq/cutoff.hpp"
#include "acq/embed.hpp"

namespace acq {

// Threshold scale: p0(n) = log2(n) / n.
double threshold_p(int n);

struct SweepConfig {
  std::vector<int> n_list;
  std::vector<double> multipliers;  // factors applied to p0(n)
  int trials = 30;
  std::uint64_t base_seed = 1;
  double eps = 0.0;  // <= 0: derive per cell as max(0.1, multiplier - 1)
  int sigma = 3;
  double alpha = 0.04;
  double beta = 0.14;
};

struct SweepRow {
  int n = 0;
  double p = 0.0;
  double multiplier = 0.0;
  int trials = 0;
  double witness_rate = 0.0;
  double certified_ge2_rate = 0.0;
  double mean_residual_bound = 0.0;  // mean certified lower bound
  double mean_runtime_ms = 0.0;      // wall time; the one nondeterministic column
};

// One row per (n, multiplier) cell, in config order. Trial t of a cell runs
// the witness pipeline and the certified bound on a fresh graph seeded by
// hash(base_seed, n, multiplier-bits, t). Deterministic given the config,
// except for mean_runtime_ms.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

extern const char* kSweepCsvHeader;
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

struct TreeStatsRow {
  int n = 0;
  int trials = 0;
  double mean_fraction = 0.0;     // long-leaf count / n, averaged
  double sample_variance = 0.0;   // of the per-tree fraction
  double ref_density = 0.0;       // e^-3
  double deviation = 0.0;         // mean_fraction - ref_density
  double frac_ge_bound = 0.0;     // share of trees with count >= n/(3 e^3)
};

// Long-leaf density over uniform random labeled trees.
TreeStatsRow run_tree_stats(int n, int trials, std::uint64_t base_seed);

extern const char* kTreeStatsCsvHeader;
void write_tree_stats_csv(const TreeStatsRow& row, std::ostream& out);

}  // namespace acq
