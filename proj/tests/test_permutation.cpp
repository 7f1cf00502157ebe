#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "runsort/errors.hpp"
#include "runsort/permutation.hpp"
#include "runsort/random.hpp"

using namespace runsort;

namespace {

Permutation P(const char* s) { return Permutation::parse(s); }

Permutation from_seq(const oracle::Seq& s) { return Permutation(std::vector<Value>(s.begin(), s.end())); }

std::vector<Block> blocks(std::initializer_list<std::pair<std::size_t, std::size_t>> list) {
  std::vector<Block> out;
  for (auto [s, l] : list) out.push_back({s, l});
  return out;
}

}  // namespace

TEST_CASE("permutation validation") {
  CHECK_THROWS_AS(Permutation({}), InvalidInput);
  CHECK_THROWS_AS(Permutation({1, 1}), InvalidInput);
  CHECK_THROWS_AS(Permutation({0, 1}), InvalidInput);
  CHECK_THROWS_AS(Permutation({1, 3}), InvalidInput);
  CHECK(P("2 3 1").to_string() == "2 3 1");
  CHECK(P("231") == P("2,3,1"));
  CHECK(P("351476298").at(3) == 1);
}

TEST_CASE("standardize") {
  const std::vector<std::int64_t> a{4, 9, 1, 7};
  CHECK(standardize(a) == P("2413"));
  const std::vector<std::int64_t> b{1, 2, 3, 4, 5};
  CHECK(standardize(b) == P("12345"));
  const std::vector<std::int64_t> c{7, 3};
  CHECK(standardize(c) == P("21"));
  const std::vector<std::int64_t> dup{3, 5, 3};
  CHECK_THROWS_AS(standardize(dup), InvalidInput);
  CHECK_THROWS_AS(standardize(std::span<const std::int64_t>{}), InvalidInput);

  SUBCASE("fixes every permutation, n <= 6") {
    for (int n = 1; n <= 6; ++n) {
      for (const auto& s : oracle::all_permutations(n)) {
        const Permutation p = from_seq(s);
        REQUIRE(standardize(p.values()) == p);
      }
    }
  }
}

TEST_CASE("ascending runs") {
  CHECK(ascending_runs(P("351476298")).runs == blocks({{1, 2}, {3, 3}, {6, 1}, {7, 2}, {9, 1}}));
  CHECK(ascending_runs(P("12345")).runs == blocks({{1, 5}}));
  CHECK(ascending_runs(P("321")).runs == blocks({{1, 1}, {2, 1}, {3, 1}}));
}

TEST_CASE("runsort examples") {
  CHECK(runsort::runsort(P("351476298")) == P("147293568"));
  CHECK(runsort::runsort(P("147293568")) == P("147293568"));
  CHECK(runsort::runsort(P("321")) == P("123"));
}

TEST_CASE("runsort properties, exhaustive n <= 7") {
  for (int n = 1; n <= 7; ++n) {
    for (const auto& s : oracle::all_permutations(n)) {
      const Permutation p = from_seq(s);
      const Permutation r = runsort::runsort(p);
      REQUIRE(r.values().size() == s.size());
      REQUIRE(std::vector<Value>(r.values().begin(), r.values().end()) == oracle::runsort(s));
      REQUIRE(runsort::runsort(r) == r);
      // Run minima of the output strictly increase.
      Value prev_min = 0;
      for (const Block& b : ascending_runs(r).runs) {
        REQUIRE(r.at(b.start) > prev_min);
        prev_min = r.at(b.start);
      }
    }
  }
}

TEST_CASE("runsort properties on large random inputs") {
  for (std::uint64_t t = 0; t < 1000; ++t) {
    Rng rng = Rng::substream(11, t);
    const Permutation p = sample_uniform(10000, rng);
    const Permutation r = runsort::runsort(p);
    REQUIRE(runsort::runsort(r) == r);
    // Concatenating the input's runs sorted by minimum reproduces the output.
    std::size_t pos = 1;
    auto runs = ascending_runs(p).runs;
    std::sort(runs.begin(), runs.end(), [&](const Block& a, const Block& b) { return p.at(a.start) < p.at(b.start); });
    for (const Block& b : runs) {
      for (std::size_t k = 0; k < b.length; ++k) REQUIRE(r.at(pos++) == p.at(b.start + k));
    }
  }
}

TEST_CASE("segment decomposition") {
  SUBCASE("break before global multiples of the cap") {
    const auto d = segment_decompose(P("351476298"));
    CHECK(d.segment_length_cap == 2);
    CHECK(d.segments == blocks({{1, 2}, {3, 1}, {4, 2}, {6, 1}, {7, 2}, {9, 1}}));
  }
  SUBCASE("identity of size 9") {
    const auto d = segment_decompose(Permutation::identity(9));
    CHECK(d.segments == blocks({{1, 1}, {2, 2}, {4, 2}, {6, 2}, {8, 2}}));
  }
  SUBCASE("short runs are kept") {
    const Permutation p = P("21436587");
    CHECK(segment_decompose(p).segments == ascending_runs(p).runs);
  }
  SUBCASE("zero cap is rejected") {
    CHECK_THROWS_AS(segment_decompose(P("21")), InvalidInput);
    CHECK_THROWS_AS(segment_decompose(P("1")), InvalidInput);
    CHECK_THROWS_AS(segment_decompose(P("4231"), 0), InvalidInput);
  }
  SUBCASE("invariants on random inputs") {
    for (std::uint64_t t = 0; t < 200; ++t) {
      Rng rng = Rng::substream(5, t);
      const std::size_t n = 3 + rng.below(300);
      // Bias towards long runs by partially sorting.
      Permutation p = sample_uniform(n, rng);
      std::vector<Value> v(p.values().begin(), p.values().end());
      std::sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rng.below(n)));
      p = Permutation(v);
      const std::size_t cap = log_cap(n);
      const auto seg = segment_decompose(p);
      const auto runs = ascending_runs(p).runs;
      std::size_t next = 1;
      for (const Block& s : seg.segments) {
        REQUIRE(s.start == next);
        next += s.length;
      }
      REQUIRE(next == n + 1);
      for (const Block& r : runs) {
        std::vector<Block> inside;
        for (const Block& s : seg.segments) {
          if (s.start >= r.start && s.start < r.start + r.length) {
            REQUIRE(s.start + s.length <= r.start + r.length);
            inside.push_back(s);
          }
        }
        if (r.length <= cap) {
          REQUIRE(inside.size() == 1);
          continue;
        }
        for (std::size_t k = 0; k < inside.size(); ++k) {
          REQUIRE(inside[k].length <= cap);
          if (k > 0) REQUIRE(inside[k].start % cap == 0);
          if (k > 0 && k + 1 < inside.size()) REQUIRE(inside[k].length == cap);
        }
      }
    }
  }
}

TEST_CASE("runsort_bar") {
  CHECK(runsort_bar(P("351476298")) == P("129354768"));
  CHECK(runsort_bar(P("321")) == P("123"));
  CHECK(runsort_bar(P("21")) == P("12"));

  SUBCASE("agrees with runsort when all runs fit the cap, exhaustive n <= 7") {
    for (int n = 3; n <= 7; ++n) {
      for (std::size_t cap = 1; cap <= 3; ++cap) {
        for (const auto& s : oracle::all_permutations(n)) {
          const Permutation p = from_seq(s);
          if (run_stats(p).max_run_length > cap) continue;
          REQUIRE(runsort_bar(p, cap) == runsort::runsort(p));
        }
      }
    }
  }
  SUBCASE("filtered random trials at n = 1000") {
    std::size_t checked = 0;
    for (std::uint64_t t = 0; t < 300; ++t) {
      Rng rng = Rng::substream(21, t);
      const Permutation p = sample_uniform(1000, rng);
      if (run_stats(p).max_run_length > log_cap(1000)) continue;
      ++checked;
      REQUIRE(runsort_bar(p) == runsort::runsort(p));
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("L statistic") {
  CHECK(l_statistic(P("147293568"), 1.0 / 3.0) == 6);
  CHECK(l_statistic(P("147293568"), 0.1) == 0);
  CHECK(l_statistic(Permutation::identity(4), 0.5) == 2);
  CHECK(l_statistic(P("3142"), 1.0) == 4);
  CHECK_THROWS_AS(l_statistic(P("12"), -0.1), InvalidInput);
  CHECK_THROWS_AS(l_statistic(P("12"), 1.5), InvalidInput);

  SUBCASE("monotone in y, table agrees with the direct scan") {
    for (std::uint64_t t = 0; t < 50; ++t) {
      Rng rng = Rng::substream(3, t);
      const Permutation p = sample_uniform(1 + rng.below(200), rng);
      const auto table = l_statistic_table(p);
      std::size_t prev = 0;
      for (std::size_t th = 0; th <= p.size(); ++th) {
        const std::size_t direct = l_statistic_at(p, th);
        REQUIRE(direct == table[th]);
        REQUIRE(direct >= prev);
        prev = direct;
      }
      REQUIRE(l_statistic(p, 1.0) == p.size());
    }
  }
}

TEST_CASE("run stats") {
  const RunStats s = run_stats(P("351476298"));
  CHECK(s.num_runs == 5);
  CHECK(s.max_run_length == 3);
  const std::vector<std::size_t> expected{3, 2, 2, 0, 0, 1, 0, 1, 0};
  CHECK(s.run_length_from_start == expected);

  const RunStats id = run_stats(Permutation::identity(6));
  CHECK(id.num_runs == 1);
  CHECK(id.run_length_from_start[0] == 6);

  const RunStats dec = run_stats(P("321"));
  CHECK(dec.num_runs == 3);
  CHECK(dec.run_length_from_start == std::vector<std::size_t>{1, 1, 1});

  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = Rng::substream(9, t);
    const Permutation p = sample_uniform(1 + rng.below(500), rng);
    const RunStats r = run_stats(p);
    std::size_t total = 0, flags = 0;
    for (std::size_t v = 0; v < p.size(); ++v) {
      total += r.run_length_from_start[v];
      flags += r.run_start_flags[v];
    }
    REQUIRE(total == p.size());
    REQUIRE(flags == r.num_runs);
  }
}

TEST_CASE("run-length tail stays under the union bound") {
  // P[some run >= T] <= (n - T + 1) / T! at n = 20, T = 5.
  constexpr std::size_t n = 20, T = 5, trials = 100000;
  std::size_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(2024, t);
    if (run_stats(sample_uniform(n, rng)).max_run_length >= T) ++hits;
  }
  const double freq = static_cast<double>(hits) / trials;
  const double bound = static_cast<double>(n - T + 1) / 120.0;
  const double se = std::sqrt(freq * (1 - freq) / trials);
  CHECK(freq <= bound + 3 * se);
}
