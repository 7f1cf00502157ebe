#pragma once

#include <cstdint>
#include <random>

#include "runsort/permutation.hpp"

namespace runsort {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under `master_seed`:
///   splitmix64(splitmix64(master_seed) + index * 0x9e3779b97f4a7c15)
constexpr std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) + index * 0x9e3779b97f4a7c15ULL);
}

/// Deterministic generator: std::mt19937_64 (whose output sequence is fixed by
/// the standard) plus bounded/real draws defined here rather than by the
/// implementation-specific std distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(substream_seed(master_seed, index));
  }

  std::uint64_t next() { return engine_(); }
  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  /// Unbiased integer in [0, bound), bound >= 1 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle of the identity. Throws InvalidInput for n < 1.
Permutation sample_uniform(std::size_t n, Rng& rng);

}  // namespace runsort
