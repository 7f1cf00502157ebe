#include "runsort/random.hpp"

#include <numeric>
#include <utility>

#include "runsort/errors.hpp"

namespace runsort {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::uint64_t Rng::below(std::uint64_t bound) {
  u128 m = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

Permutation sample_uniform(std::size_t n, Rng& rng) {
  if (n < 1) throw InvalidInput("sample_uniform requires n >= 1");
  std::vector<Value> e(n);
  std::iota(e.begin(), e.end(), Value{1});
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(e[i], e[rng.below(i + 1)]);
  }
  return from_trusted(std::move(e));
}

}  // namespace runsort
