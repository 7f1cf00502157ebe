#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runsort/permutation.hpp"

namespace runsort {

/// A prefix-closed family F of permutations that contains 1 in S_1.
///
/// `contains` receives a window of distinct values and answers whether its
/// standardization lies in F. `extends` may assume that the window with its
/// last element dropped is already in F, which lets order-invariant families
/// answer in O(1) during the greedy scan.
class FamilyOracle {
 public:
  virtual ~FamilyOracle() = default;
  virtual std::string_view name() const = 0;
  virtual bool contains(std::span<const Value> window) const = 0;
  virtual bool extends(std::span<const Value> window) const { return contains(window); }
};

/// Family given by a predicate on (standardized) permutations. Every query
/// standardizes its window first.
class PredicateFamily final : public FamilyOracle {
 public:
  PredicateFamily(std::string name, std::function<bool(const Permutation&)> predicate)
      : name_(std::move(name)), predicate_(std::move(predicate)) {}
  std::string_view name() const override { return name_; }
  bool contains(std::span<const Value> window) const override;

 private:
  std::string name_;
  std::function<bool(const Permutation&)> predicate_;
};

/// Increasing permutations; F-sort under it is runsort. Name "inc".
const FamilyOracle& increasing_family();
/// No index i with w[i-1] > w[i] > w[i+1]. Name "ddes".
const FamilyOracle& no_double_descent_family();
/// No index i with w[i-1] > w[i] < w[i+1]. Name "val".
const FamilyOracle& no_valley_family();
/// Looks up "inc", "ddes" or "val"; throws InvalidInput otherwise.
const FamilyOracle& family_by_name(std::string_view name);

bool family_contains(const FamilyOracle& family, const Permutation& sigma);

struct FRunDecomposition {
  std::vector<Block> f_runs;
  /// k_0 = 1 < k_1 < ... < k_r = n + 1.
  std::vector<std::size_t> breakpoints;
  friend bool operator==(const FRunDecomposition&, const FRunDecomposition&) = default;
};

/// Greedy F-run decomposition using `extends` on growing windows.
/// Throws InvalidFamily if the family rejects the one-element permutation.
FRunDecomposition f_runs(const Permutation& perm, const FamilyOracle& family);

/// Same decomposition, standardizing every candidate window explicitly and
/// querying `contains` only. Quadratic; for cross-checking.
FRunDecomposition f_runs_reference(const Permutation& perm, const FamilyOracle& family);

/// Concatenates `blocks` sorted by their minimal entries.
Permutation sort_blocks_by_min(const Permutation& perm, std::span<const Block> blocks);

Permutation f_sort(const Permutation& perm, const FamilyOracle& family);

}  // namespace runsort
