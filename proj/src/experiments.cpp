#include "acq/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

#include "acq/bounds.hpp"

namespace acq {

double threshold_p(int n) {
  return std::log2(static_cast<double>(n)) / static_cast<double>(n);
}

namespace {

std::uint64_t double_bits(double x) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  return bits;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("sweep: trials < 1");
  for (double m : cfg.multipliers)
    if (!(m > 0.0)) throw std::invalid_argument("sweep: multiplier <= 0");

  std::vector<SweepRow> rows;
  for (int n : cfg.n_list) {
    for (double mult : cfg.multipliers) {
      SweepRow row;
      row.n = n;
      row.multiplier = mult;
      row.p = std::min(1.0, mult * threshold_p(n));
      row.trials = cfg.trials;

      const double eps = cfg.eps > 0.0 ? cfg.eps : std::max(0.1, mult - 1.0);
      ParamSet params = ParamSet::make(n, eps, cfg.sigma, cfg.alpha, cfg.beta);

      int witnesses = 0, ge2 = 0;
      double bound_sum = 0.0, ms_sum = 0.0;
      for (int t = 0; t < cfg.trials; ++t) {
        RandomSource rng = RandomSource::derived(
            cfg.base_seed, {static_cast<std::uint64_t>(n), double_bits(mult),
                            static_cast<std::uint64_t>(t)});
        const std::uint64_t trial_seed = rng.seed();
        const auto t0 = std::chrono::steady_clock::now();
        Graph g = sample_gnp(n, row.p, rng);
        PipelineReport rep = witness_pipeline_on(g, params, rng, row.p, trial_seed);
        const int bound = certified_lower_bound(g);
        const auto t1 = std::chrono::steady_clock::now();
        if (rep.outcome == "witness") ++witnesses;
        if (bound >= 2) ++ge2;
        bound_sum += bound;
        ms_sum += std::chrono::duration<double, std::milli>(t1 - t0).count();
      }
      row.witness_rate = static_cast<double>(witnesses) / cfg.trials;
      row.certified_ge2_rate = static_cast<double>(ge2) / cfg.trials;
      row.mean_residual_bound = bound_sum / cfg.trials;
      row.mean_runtime_ms = ms_sum / cfg.trials;
      rows.push_back(row);
    }
  }
  return rows;
}

const char* kSweepCsvHeader =
    "n,p,multiplier,trials,witness_rate,certified_ge2_rate,mean_residual_bound,"
    "mean_runtime_ms";

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%d,%.6f,%.6f,%.6f,%.3f", r.n, r.p,
                  r.multiplier, r.trials, r.witness_rate, r.certified_ge2_rate,
                  r.mean_residual_bound, r.mean_runtime_ms);
    out << buf << '\n';
  }
}

TreeStatsRow run_tree_stats(int n, int trials, std::uint64_t base_seed) {
  if (n < 6) throw std::invalid_argument("tree_stats: n < 6");
  if (trials < 1) throw std::invalid_argument("tree_stats: trials < 1");

  TreeStatsRow row;
  row.n = n;
  row.trials = trials;
  row.ref_density = std::exp(-3.0);
  const double bound = n / (3.0 * std::exp(3.0));

  double mean = 0.0, m2 = 0.0;
  int ge = 0;
  for (int t = 0; t < trials; ++t) {
    RandomSource rng = RandomSource::derived(
        base_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)});
    Graph tree = sample_random_tree(n, rng);
    const int count = static_cast<int>(long_leaves(tree).size());
    if (count >= bound) ++ge;
    const double frac = static_cast<double>(count) / n;
    const double delta = frac - mean;
    mean += delta / (t + 1);
    m2 += delta * (frac - mean);
  }
  row.mean_fraction = mean;
  row.sample_variance = trials > 1 ? m2 / (trials - 1) : 0.0;
  row.deviation = mean - row.ref_density;
  row.frac_ge_bound = static_cast<double>(ge) / trials;
  return row;
}

const char* kTreeStatsCsvHeader =
    "n,trials,mean_fraction,sample_variance,ref_density,deviation,frac_ge_bound";

void write_tree_stats_csv(const TreeStatsRow& row, std::ostream& out) {
  out << kTreeStatsCsvHeader << '\n';
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.10g,%.6f,%.6f,%.6f", row.n, row.trials,
                row.mean_fraction, row.sample_variance, row.ref_density, row.deviation,
                row.frac_ge_bound);
  out << buf << '\n';
}

}  // namespace acq
