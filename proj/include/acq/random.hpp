#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace acq {

// Seeded pseudo-random stream. Identical seed gives an identical draw
// sequence on every platform: the engine is mt19937_64 (bit-exact per the
// standard) and all mappings below avoid std distributions, whose output
// is implementation-defined.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0,1), 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0,bound); rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // SplitMix64 finalizer; used to derive child seeds.
  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    std::uint64_t z = h + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Independent stream for a Monte Carlo trial: hash of the base seed and
  // the trial coordinates.
  static RandomSource derived(std::uint64_t base,
                              std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = mix(0x2545f4914f6cdd1dULL, base);
    for (std::uint64_t p : parts) h = mix(h, p);
    return RandomSource(h);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace acq
