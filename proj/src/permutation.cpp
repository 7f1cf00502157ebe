#include "runsort/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "runsort/errors.hpp"

namespace runsort {

Permutation::Permutation(std::vector<Value> entries) : entries_(std::move(entries)) {
  const std::size_t n = entries_.size();
  if (n == 0) throw InvalidInput("permutation must have at least one entry");
  std::vector<bool> seen(n + 1, false);
  for (Value v : entries_) {
    if (v < 1 || static_cast<std::size_t>(v) > n) {
      throw InvalidInput("permutation entry " + std::to_string(v) + " outside 1.." +
                         std::to_string(n));
    }
    if (seen[v]) throw InvalidInput("permutation entry " + std::to_string(v) + " repeated");
    seen[v] = true;
  }
}

Permutation from_trusted(std::vector<Value> entries) {
  return Permutation(Permutation::Trusted{}, std::move(entries));
}

Permutation Permutation::identity(std::size_t n) {
  if (n == 0) throw InvalidInput("permutation must have at least one entry");
  std::vector<Value> e(n);
  std::iota(e.begin(), e.end(), Value{1});
  return from_trusted(std::move(e));
}

Permutation Permutation::parse(std::string_view text) {
  std::vector<Value> e;
  const bool spaced = text.find_first_of(" \t,") != std::string_view::npos;
  if (spaced) {
    std::string s(text);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    long long v;
    while (in >> v) e.push_back(static_cast<Value>(v));
    if (!in.eof()) throw InvalidInput("unparseable permutation: " + std::string(text));
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw InvalidInput("unparseable permutation: " + std::string(text));
      e.push_back(c - '0');
    }
  }
  return Permutation(std::move(e));
}

std::vector<std::size_t> Permutation::positions() const {
  std::vector<std::size_t> pos(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) pos[entries_[i] - 1] = i + 1;
  return pos;
}

std::string Permutation::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(entries_[i]);
  }
  return out;
}

namespace {

template <typename T>
Permutation standardize_impl(std::span<const T> seq) {
  if (seq.empty()) throw InvalidInput("cannot standardize an empty sequence");
  std::vector<std::size_t> order(seq.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return seq[a] < seq[b]; });
  std::vector<Value> e(seq.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (rank > 0 && seq[order[rank]] == seq[order[rank - 1]]) {
      throw InvalidInput("cannot standardize a sequence with repeated values");
    }
    e[order[rank]] = static_cast<Value>(rank + 1);
  }
  return from_trusted(std::move(e));
}

}  // namespace

Permutation standardize(std::span<const std::int64_t> seq) { return standardize_impl(seq); }
Permutation standardize(std::span<const Value> seq) { return standardize_impl(seq); }

RunDecomposition ascending_runs(const Permutation& perm) {
  RunDecomposition d;
  const std::size_t n = perm.size();
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || perm[i] < perm[i - 1]) {
      d.runs.push_back({start + 1, i - start});
      start = i;
    }
  }
  return d;
}

Permutation sort_blocks_by_first(const Permutation& perm, std::span<const Block> blocks) {
  std::vector<Block> sorted(blocks.begin(), blocks.end());
  std::sort(sorted.begin(), sorted.end(),
            [&](const Block& a, const Block& b) { return perm.at(a.start) < perm.at(b.start); });
  std::vector<Value> out;
  out.reserve(perm.size());
  const auto v = perm.values();
  for (const Block& b : sorted) out.insert(out.end(), v.begin() + (b.start - 1), v.begin() + (b.start - 1 + b.length));
  return from_trusted(std::move(out));
}

Permutation runsort(const Permutation& perm) {
  return sort_blocks_by_first(perm, ascending_runs(perm).runs);
}

std::size_t log_cap(std::size_t n) {
  return static_cast<std::size_t>(std::floor(std::log(static_cast<double>(n))));
}

SegmentDecomposition segment_decompose(const Permutation& perm) {
  return segment_decompose(perm, log_cap(perm.size()));
}

SegmentDecomposition segment_decompose(const Permutation& perm, std::size_t cap) {
  if (cap < 1) {
    throw InvalidInput("segment length cap floor(ln n) is 0 for n = " + std::to_string(perm.size()));
  }
  SegmentDecomposition d{{}, cap};
  for (const Block& run : ascending_runs(perm).runs) {
    if (run.length <= cap) {
      d.segments.push_back(run);
      continue;
    }
    const std::size_t end = run.start + run.length;
    std::size_t seg_start = run.start;
    std::size_t next_break = (run.start / cap + 1) * cap;
    while (next_break < end) {
      d.segments.push_back({seg_start, next_break - seg_start});
      seg_start = next_break;
      next_break += cap;
    }
    d.segments.push_back({seg_start, end - seg_start});
  }
  return d;
}

Permutation runsort_bar(const Permutation& perm) {
  const std::size_t cap = log_cap(perm.size());
  if (cap < 1) return runsort(perm);
  return runsort_bar(perm, cap);
}

Permutation runsort_bar(const Permutation& perm, std::size_t cap) {
  return sort_blocks_by_first(perm, segment_decompose(perm, cap).segments);
}

std::size_t l_statistic_at(const Permutation& perm, std::size_t threshold) {
  threshold = std::min(threshold, perm.size());
  std::size_t last = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (static_cast<std::size_t>(perm[i]) <= threshold) last = i + 1;
  }
  return last;
}

std::size_t scaled_floor(double y, std::size_t n) {
  const double yn = y * static_cast<double>(n);
  const double nearest = std::round(yn);
  if (std::abs(yn - nearest) <= 1e-9 * std::max(1.0, yn)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(yn));
}

std::size_t scaled_ceil(double t, std::size_t n) {
  const double tn = t * static_cast<double>(n);
  const double nearest = std::round(tn);
  if (std::abs(tn - nearest) <= 1e-9 * std::max(1.0, tn)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(tn));
}

std::size_t l_statistic(const Permutation& perm, double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw InvalidInput("y must lie in [0, 1]");
  return l_statistic_at(perm, scaled_floor(y, perm.size()));
}

std::vector<std::size_t> l_statistic_table(const Permutation& perm) {
  const auto pos = perm.positions();
  std::vector<std::size_t> table(perm.size() + 1, 0);
  for (std::size_t t = 1; t <= perm.size(); ++t) table[t] = std::max(table[t - 1], pos[t - 1]);
  return table;
}

RunStats run_stats(const Permutation& perm) {
  RunStats s;
  const std::size_t n = perm.size();
  s.run_start_flags.assign(n, false);
  s.run_length_from_start.assign(n, 0);
  for (const Block& run : ascending_runs(perm).runs) {
    const Value first = perm.at(run.start);
    s.run_start_flags[first - 1] = true;
    s.run_length_from_start[first - 1] = run.length;
    ++s.num_runs;
    s.max_run_length = std::max(s.max_run_length, run.length);
  }
  return s;
}

}  // namespace runsort
