#include "runsort/fsort.hpp"

#include <algorithm>

#include "runsort/errors.hpp"

namespace runsort {

bool PredicateFamily::contains(std::span<const Value> window) const {
  return predicate_(standardize(window));
}

namespace {

class IncreasingFamily final : public FamilyOracle {
 public:
  std::string_view name() const override { return "inc"; }
  bool contains(std::span<const Value> w) const override {
    return std::adjacent_find(w.begin(), w.end(), std::greater_equal<>()) == w.end();
  }
  bool extends(std::span<const Value> w) const override {
    return w.size() < 2 || w[w.size() - 2] < w[w.size() - 1];
  }
};

// Families forbidding a pattern on three consecutive entries; membership is
// order-invariant so raw values can be compared directly.
template <typename Forbidden>
class ConsecutiveTripleFamily final : public FamilyOracle {
 public:
  explicit ConsecutiveTripleFamily(std::string_view name) : name_(name) {}
  std::string_view name() const override { return name_; }
  bool contains(std::span<const Value> w) const override {
    for (std::size_t i = 2; i < w.size(); ++i) {
      if (Forbidden{}(w[i - 2], w[i - 1], w[i])) return false;
    }
    return true;
  }
  bool extends(std::span<const Value> w) const override {
    const std::size_t k = w.size();
    return k < 3 || !Forbidden{}(w[k - 3], w[k - 2], w[k - 1]);
  }

 private:
  std::string_view name_;
};

struct DoubleDescent {
  bool operator()(Value a, Value b, Value c) const { return a > b && b > c; }
};
struct Valley {
  bool operator()(Value a, Value b, Value c) const { return a > b && b < c; }
};

void require_singleton(const FamilyOracle& family) {
  const Value one[] = {1};
  if (!family.contains(one)) {
    throw InvalidFamily("family '" + std::string(family.name()) + "' does not contain 1");
  }
}

template <typename InFamily>
FRunDecomposition greedy_runs(const Permutation& perm, InFamily in_family) {
  FRunDecomposition d;
  const auto v = perm.values();
  const std::size_t n = v.size();
  std::size_t start = 0;
  d.breakpoints.push_back(1);
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && in_family(v.subspan(start, end + 1 - start))) ++end;
    d.f_runs.push_back({start + 1, end - start});
    d.breakpoints.push_back(end + 1);
    start = end;
  }
  return d;
}

}  // namespace

const FamilyOracle& increasing_family() {
  static const IncreasingFamily family;
  return family;
}

const FamilyOracle& no_double_descent_family() {
  static const ConsecutiveTripleFamily<DoubleDescent> family("ddes");
  return family;
}

const FamilyOracle& no_valley_family() {
  static const ConsecutiveTripleFamily<Valley> family("val");
  return family;
}

const FamilyOracle& family_by_name(std::string_view name) {
  if (name == "inc") return increasing_family();
  if (name == "ddes") return no_double_descent_family();
  if (name == "val") return no_valley_family();
  throw InvalidInput("unknown family '" + std::string(name) + "' (expected inc, ddes or val)");
}

bool family_contains(const FamilyOracle& family, const Permutation& sigma) {
  return family.contains(sigma.values());
}

FRunDecomposition f_runs(const Permutation& perm, const FamilyOracle& family) {
  require_singleton(family);
  return greedy_runs(perm, [&](std::span<const Value> w) { return family.extends(w); });
}

FRunDecomposition f_runs_reference(const Permutation& perm, const FamilyOracle& family) {
  require_singleton(family);
  return greedy_runs(perm, [&](std::span<const Value> w) {
    return family.contains(standardize(w).values());
  });
}

Permutation sort_blocks_by_min(const Permutation& perm, std::span<const Block> blocks) {
  const auto v = perm.values();
  std::vector<std::pair<Value, Block>> keyed;
  keyed.reserve(blocks.size());
  for (const Block& b : blocks) {
    keyed.emplace_back(*std::min_element(v.begin() + (b.start - 1), v.begin() + (b.start - 1 + b.length)), b);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Value> out;
  out.reserve(v.size());
  for (const auto& [key, b] : keyed) {
    out.insert(out.end(), v.begin() + (b.start - 1), v.begin() + (b.start - 1 + b.length));
  }
  return from_trusted(std::move(out));
}

Permutation f_sort(const Permutation& perm, const FamilyOracle& family) {
  return sort_blocks_by_min(perm, f_runs(perm, family).f_runs);
}

}  // namespace runsort
