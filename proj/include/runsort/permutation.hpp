#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace runsort {

using Value = std::int32_t;

/// A bijection of {1, ..., n}, stored as its one-line notation.
///
/// Positions are 1-based in every public API that talks about "position i";
/// `operator[]` is the usual 0-based container access.
class Permutation {
 public:
  /// Validates that `entries` is a bijection of {1..n}, n >= 1.
  explicit Permutation(std::vector<Value> entries);

  static Permutation identity(std::size_t n);
  /// Parses "3 5 1 4" or, for n <= 9, the compact digit form "3514".
  static Permutation parse(std::string_view text);

  std::size_t size() const { return entries_.size(); }
  Value operator[](std::size_t index) const { return entries_[index]; }
  /// 1-based position lookup.
  Value at(std::size_t position) const { return entries_.at(position - 1); }
  std::span<const Value> values() const { return entries_; }

  /// positions()[v - 1] is the 1-based position holding value v.
  std::vector<std::size_t> positions() const;

  /// Space-separated one-line notation.
  std::string to_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  struct Trusted {};
  Permutation(Trusted, std::vector<Value> entries) : entries_(std::move(entries)) {}
  friend Permutation from_trusted(std::vector<Value> entries);

  std::vector<Value> entries_;
};

/// Internal fast path for producers that construct bijections by design.
Permutation from_trusted(std::vector<Value> entries);

/// Contiguous block of positions [start, start + length).
struct Block {
  std::size_t start;   // 1-based
  std::size_t length;  // >= 1
  friend bool operator==(const Block&, const Block&) = default;
};

struct RunDecomposition {
  std::vector<Block> runs;
};

struct SegmentDecomposition {
  std::vector<Block> segments;
  std::size_t segment_length_cap;
};

struct RunStats {
  std::size_t num_runs = 0;
  std::size_t max_run_length = 0;
  /// Indexed by value - 1.
  std::vector<bool> run_start_flags;
  std::vector<std::size_t> run_length_from_start;
};

/// Relative-order permutation of distinct integers, e.g. 4917 -> 2413.
Permutation standardize(std::span<const std::int64_t> seq);
Permutation standardize(std::span<const Value> seq);

RunDecomposition ascending_runs(const Permutation& perm);

/// Concatenates the blocks of `perm` sorted by their first entries.
Permutation sort_blocks_by_first(const Permutation& perm, std::span<const Block> blocks);

Permutation runsort(const Permutation& perm);

/// floor(ln n), the segment length cap.
std::size_t log_cap(std::size_t n);

/// Splits runs longer than the cap before every global position divisible by
/// the cap. Throws InvalidInput if the cap is 0.
SegmentDecomposition segment_decompose(const Permutation& perm);
SegmentDecomposition segment_decompose(const Permutation& perm, std::size_t cap);

/// Falls back to runsort when floor(ln n) < 1.
Permutation runsort_bar(const Permutation& perm);
Permutation runsort_bar(const Permutation& perm, std::size_t cap);

/// Largest position holding a value <= threshold, or 0 if threshold < 1.
std::size_t l_statistic_at(const Permutation& perm, std::size_t threshold);
/// L(y) with threshold floor(y n). Throws InvalidInput for y outside [0,1].
std::size_t l_statistic(const Permutation& perm, double y);
/// floor(y n), tolerant of y n landing a few ulps below an integer.
std::size_t scaled_floor(double y, std::size_t n);
/// ceil(t n), with the same tolerance.
std::size_t scaled_ceil(double t, std::size_t n);

/// prefix[t] = L at threshold t for t in [0, n]; O(n).
std::vector<std::size_t> l_statistic_table(const Permutation& perm);

RunStats run_stats(const Permutation& perm);

}  // namespace runsort
