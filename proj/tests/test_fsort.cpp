#include <doctest.h>

#include "oracles.hpp"
#include "runsort/errors.hpp"
#include "runsort/fsort.hpp"
#include "runsort/random.hpp"

using namespace runsort;

namespace {

Permutation P(const char* s) { return Permutation::parse(s); }
Permutation from_seq(const oracle::Seq& s) { return Permutation(std::vector<Value>(s.begin(), s.end())); }

// Definitions straight from the pattern descriptions, on standardized input.
bool has_double_descent(const oracle::Seq& s) {
  for (std::size_t i = 1; i + 1 < s.size(); ++i)
    if (s[i - 1] > s[i] && s[i] > s[i + 1]) return true;
  return false;
}
bool has_valley(const oracle::Seq& s) {
  for (std::size_t i = 1; i + 1 < s.size(); ++i)
    if (s[i - 1] > s[i] && s[i] < s[i + 1]) return true;
  return false;
}

const FamilyOracle* const kBuiltins[] = {&increasing_family(), &no_double_descent_family(), &no_valley_family()};

}  // namespace

TEST_CASE("family membership") {
  CHECK_FALSE(family_contains(no_double_descent_family(), P("321")));
  CHECK_FALSE(family_contains(no_valley_family(), P("213")));
  CHECK(family_contains(no_valley_family(), P("231")));
  for (const FamilyOracle* f : kBuiltins) {
    CHECK(family_contains(*f, P("1")));
    if (f != &increasing_family()) {
      CHECK(family_contains(*f, P("12")));
      CHECK(family_contains(*f, P("21")));
    }
  }
  CHECK(family_contains(increasing_family(), P("123")));
  CHECK_FALSE(family_contains(increasing_family(), P("132")));
  CHECK(&family_by_name("ddes") == &no_double_descent_family());
  CHECK_THROWS_AS(family_by_name("peaks"), InvalidInput);
}

TEST_CASE("built-in membership matches the definitions, n <= 7") {
  for (int n = 1; n <= 7; ++n) {
    for (const auto& s : oracle::all_permutations(n)) {
      const Permutation p = from_seq(s);
      REQUIRE(family_contains(no_double_descent_family(), p) == !has_double_descent(s));
      REQUIRE(family_contains(no_valley_family(), p) == !has_valley(s));
    }
  }
}

TEST_CASE("raw windows and standardized windows agree, n <= 7") {
  for (int n = 1; n <= 7; ++n) {
    for (const auto& s : oracle::all_permutations(n)) {
      // Scale into a non-standard window with the same relative order.
      std::vector<Value> raw;
      for (int v : s) raw.push_back(3 * v + 10);
      for (const FamilyOracle* f : kBuiltins) {
        REQUIRE(f->contains(raw) == f->contains(standardize(raw).values()));
      }
    }
  }
}

TEST_CASE("built-in families are prefix-closed, n <= 7") {
  for (int n = 1; n <= 7; ++n) {
    for (const auto& s : oracle::all_permutations(n)) {
      const Permutation p = from_seq(s);
      for (const FamilyOracle* f : kBuiltins) {
        if (!family_contains(*f, p)) continue;
        for (std::size_t len = 1; len <= s.size(); ++len) {
          const oracle::Seq prefix = oracle::standardize(oracle::Seq(s.begin(), s.begin() + len));
          REQUIRE(family_contains(*f, from_seq(prefix)));
        }
      }
    }
  }
}

TEST_CASE("F-run examples") {
  const auto d = f_runs(P("321"), no_double_descent_family());
  CHECK(d.f_runs == std::vector<Block>{{1, 2}, {3, 1}});
  CHECK(d.breakpoints == std::vector<std::size_t>{1, 3, 4});
  CHECK(f_sort(P("321"), no_double_descent_family()) == P("132"));

  const auto inc = f_runs(P("351476298"), increasing_family());
  CHECK(inc.f_runs == ascending_runs(P("351476298")).runs);

  const Permutation in_family = P("2413");
  REQUIRE(family_contains(no_double_descent_family(), in_family));
  CHECK(f_runs(in_family, no_double_descent_family()).f_runs.size() == 1);
  for (const FamilyOracle* f : kBuiltins) CHECK(f_sort(Permutation::identity(8), *f) == Permutation::identity(8));
}

TEST_CASE("family rejecting 1 is invalid") {
  const PredicateFamily broken("broken", [](const Permutation& p) { return p.size() > 1; });
  CHECK_THROWS_AS(f_runs(P("12"), broken), InvalidFamily);
  CHECK_THROWS_AS(f_sort(P("12"), broken), InvalidFamily);
}

TEST_CASE("F-run invariants, exhaustive n <= 7") {
  for (int n = 1; n <= 7; ++n) {
    for (const auto& s : oracle::all_permutations(n)) {
      const Permutation p = from_seq(s);
      for (const FamilyOracle* f : kBuiltins) {
        const auto d = f_runs(p, *f);
        REQUIRE(d == f_runs_reference(p, *f));
        std::size_t next = 1;
        for (std::size_t t = 0; t < d.f_runs.size(); ++t) {
          const Block& b = d.f_runs[t];
          REQUIRE(b.start == next);
          REQUIRE(d.breakpoints[t] == b.start);
          next += b.length;
          const auto window = p.values().subspan(b.start - 1, b.length);
          REQUIRE(f->contains(standardize(window).values()));
          // Greedy maximality: one more entry leaves the family.
          if (next <= p.size()) {
            REQUIRE_FALSE(f->contains(standardize(p.values().subspan(b.start - 1, b.length + 1)).values()));
          }
        }
        REQUIRE(next == p.size() + 1);
        REQUIRE(d.breakpoints.back() == p.size() + 1);

        const Permutation sorted = f_sort(p, *f);
        Value prev = 0;
        std::size_t pos = 1;
        std::vector<Block> runs = d.f_runs;
        std::sort(runs.begin(), runs.end(), [&](const Block& a, const Block& b) {
          auto wa = p.values().subspan(a.start - 1, a.length), wb = p.values().subspan(b.start - 1, b.length);
          return *std::min_element(wa.begin(), wa.end()) < *std::min_element(wb.begin(), wb.end());
        });
        for (const Block& b : runs) {
          const auto w = p.values().subspan(b.start - 1, b.length);
          const Value mn = *std::min_element(w.begin(), w.end());
          REQUIRE(mn > prev);
          prev = mn;
          for (std::size_t k = 0; k < b.length; ++k) REQUIRE(sorted.at(pos++) == w[k]);
        }
      }
    }
  }
}

TEST_CASE("inc-sort is runsort, exhaustive n <= 8") {
  for (int n = 1; n <= 8; ++n) {
    for (const auto& s : oracle::all_permutations(n)) {
      const Permutation p = from_seq(s);
      REQUIRE(f_sort(p, increasing_family()) == runsort::runsort(p));
    }
  }
}

TEST_CASE("predicate families use the slow path consistently") {
  const PredicateFamily ddes_slow("ddes-slow", [](const Permutation& p) {
    const auto v = p.values();
    return !has_double_descent(oracle::Seq(v.begin(), v.end()));
  });
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng rng = Rng::substream(8, t);
    const Permutation p = sample_uniform(300, rng);
    CHECK(f_runs(p, ddes_slow) == f_runs(p, no_double_descent_family()));
  }
}

TEST_CASE("greedy scan is linear at n = 50000") {
  Rng rng = Rng::substream(1, 0);
  const Permutation p = sample_uniform(50000, rng);
  for (const FamilyOracle* f : kBuiltins) {
    const Permutation s = f_sort(p, *f);
    CHECK(s.size() == 50000);
  }
}
