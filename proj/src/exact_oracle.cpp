#include "runsort/exact_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <thread>

#include "runsort/errors.hpp"
#include "runsort/permutation.hpp"

namespace runsort {

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    return Rational(BigInt(text.substr(0, slash))) / Rational(BigInt(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw InvalidInput("not a rational: " + text);
  }
}

namespace {

constexpr std::size_t kMaxEnumerated = 16;

struct Tally {
  std::size_t n = 0;
  std::vector<std::uint64_t> p, q;  // (i - 1) * n + (j - 1)
  std::uint64_t runs = 0;
  std::vector<std::uint64_t> l_totals;

  explicit Tally(std::size_t size)
      : n(size), p(size * size, 0), q(size * size, 0), l_totals(size + 1, 0) {}

  void merge(const Tally& o) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] += o.p[k];
      q[k] += o.q[k];
    }
    runs += o.runs;
    for (std::size_t t = 0; t <= n; ++t) l_totals[t] += o.l_totals[t];
  }
};

// Tallies every permutation whose first entry is `lead`.
void tally_block(std::size_t n, int lead, Tally& tally) {
  std::array<int, kMaxEnumerated> perm{};
  perm[0] = lead;
  for (std::size_t k = 1, v = 1; k < n; ++v) {
    if (static_cast<int>(v) != lead) perm[k++] = static_cast<int>(v);
  }
  std::array<std::size_t, kMaxEnumerated + 1> run_start{}, run_order{};
  std::array<int, kMaxEnumerated> sorted{};
  std::array<bool, kMaxEnumerated> is_start{};
  std::array<std::size_t, kMaxEnumerated + 1> position_of{};
  do {
    std::size_t runs = 0;
    for (std::size_t k = 0; k < n; ++k) {
      is_start[k] = (k == 0 || perm[k] < perm[k - 1]);
      if (is_start[k]) run_start[runs++] = k;
    }
    run_start[runs] = n;
    std::iota(run_order.begin(), run_order.begin() + runs, std::size_t{0});
    std::sort(run_order.begin(), run_order.begin() + runs,
              [&](std::size_t a, std::size_t b) { return perm[run_start[a]] < perm[run_start[b]]; });
    std::size_t out = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      const std::size_t idx = run_order[r];
      for (std::size_t k = run_start[idx]; k < run_start[idx + 1]; ++k) {
        sorted[out] = perm[k];
        const std::size_t cell = out * n + static_cast<std::size_t>(perm[k] - 1);
        ++tally.p[cell];
        if (k == run_start[idx]) ++tally.q[cell];
        position_of[perm[k]] = out + 1;
        ++out;
      }
    }
    tally.runs += runs;
    std::size_t last = 0;
    for (std::size_t t = 1; t <= n; ++t) {
      last = std::max(last, position_of[t]);
      tally.l_totals[t] += last;
    }
  } while (std::next_permutation(perm.begin() + 1, perm.begin() + n));
}

}  // namespace

Rational ProbabilityTables::expected_l_at(std::size_t threshold) const {
  threshold = std::min(threshold, n);
  return Rational(l_totals[threshold]) / Rational(factorial);
}

Rational ProbabilityTables::expected_l(double y) const {
  if (!(y >= 0.0 && y <= 1.0)) throw InvalidInput("y must lie in [0, 1]");
  return expected_l_at(scaled_floor(y, n));
}

Rational ProbabilityTables::expected_mass(std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) const {
  Rational sum = 0;
  for (std::size_t i = i1 + 1; i <= std::min(i2, n); ++i) {
    for (std::size_t j = j1 + 1; j <= std::min(j2, n); ++j) sum += p(i, j);
  }
  return sum / n;
}

ProbabilityTables enumerate_tables(std::size_t n, unsigned threads, std::size_t max_n) {
  if (n < 1) throw InvalidInput("enumeration requires n >= 1");
  if (n > max_n || n > kMaxEnumerated) {
    throw ResourceLimit("enumeration of S_" + std::to_string(n) + " exceeds the cap n <= " +
                        std::to_string(std::min(max_n, kMaxEnumerated)));
  }
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(n));
  std::vector<Tally> partial(threads, Tally(n));
  auto work = [&](unsigned t) {
    for (std::size_t lead = 1 + t; lead <= n; lead += threads) tally_block(n, static_cast<int>(lead), partial[t]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  Tally total(n);
  for (const Tally& t : partial) total.merge(t);

  ProbabilityTables tables;
  tables.n = n;
  tables.factorial = 1;
  for (std::size_t k = 2; k <= n; ++k) tables.factorial *= k;
  const Rational denom(tables.factorial);
  tables.p = RationalMatrix(n);
  tables.q = RationalMatrix(n);
  tables.p_prime = RationalMatrix(n);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t cell = (i - 1) * n + (j - 1);
      tables.p(i, j) = Rational(total.p[cell]) / denom;
      tables.q(i, j) = Rational(total.q[cell]) / denom;
      tables.p_prime(i, j) = Rational(total.p[cell] - total.q[cell]) / denom;
    }
  }
  tables.expected_runs = Rational(total.runs) / denom;
  tables.l_totals.reserve(n + 1);
  for (std::uint64_t v : total.l_totals) tables.l_totals.emplace_back(v);
  return tables;
}

std::vector<RecurrenceWitness> verify_recurrence(const ProbabilityTables& tables,
                                                 const ProbabilityTables& smaller) {
  const std::size_t n = tables.n;
  if (n < 2 || smaller.n + 1 != n) {
    throw PreconditionError("recurrence check needs tables for n and n - 1 with n >= 2");
  }
  std::vector<RecurrenceWitness> failures;
  for (std::size_t i = 2; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      Rational tail = 0;
      for (std::size_t k = j; k <= n - 1; ++k) tail += smaller.p(i - 1, k);
      const Rational rhs = (1 - tail) / n;
      if (tables.p_prime(i, j) != rhs) failures.push_back({i, j, tables.p_prime(i, j), rhs});
    }
  }
  return failures;
}

namespace {

// Row (n, i) of p~ from row (n - 1, i - 1); rows are indexed by j - 1.
template <typename T>
std::vector<T> next_row(const std::vector<T>& prev, std::size_t n) {
  std::vector<T> row(n);
  T tail = 0;  // sum_{k = j}^{n-1} prev[k - 1]
  for (std::size_t j = n; j >= 1; --j) {
    if (j <= n - 1) tail += prev[j - 1];
    row[j - 1] = (T(1) - tail) / T(n);
  }
  return row;
}

template <typename T>
T p_tilde_cone(std::size_t n, std::size_t i, std::size_t j) {
  if (i < 1 || j < 1 || i > n || j > n) throw InvalidInput("p~ requires 1 <= i, j <= n");
  // Level r of the cone is (n - r, i - r); the bottom level i - r = 1 is zero.
  std::size_t size = n - (i - 1);
  std::vector<T> row(size, T(0));
  for (std::size_t r = i - 1; r-- > 0;) {
    ++size;
    row = next_row(row, size);
  }
  return row[j - 1];
}

BigInt binomial(std::int64_t top, std::int64_t k) {
  if (k < 0 || top < 0 || k > top) return 0;
  BigInt out = 1;
  for (std::int64_t t = 1; t <= k; ++t) {
    out *= top - k + t;
    out /= t;
  }
  return out;
}

// n (n - 1) ... (n - r), r + 1 factors.
BigInt falling(std::int64_t n, std::int64_t r) {
  BigInt out = 1;
  for (std::int64_t t = 0; t <= r; ++t) out *= n - t;
  return out;
}

std::int64_t upper_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i < 2 || j < 1 || i > n || j > n) throw InvalidInput("closed forms require 2 <= i <= n, 1 <= j <= n");
  return std::min<std::int64_t>(static_cast<std::int64_t>(n - j), static_cast<std::int64_t>(i) - 2);
}

}  // namespace

PTildeTable::PTildeTable(std::size_t n_max) : rows_(n_max + 1) {
  for (std::size_t n = 1; n <= n_max; ++n) {
    rows_[n] = RationalMatrix(n);
    for (std::size_t i = 2; i <= n; ++i) {
      Rational tail = 0;
      for (std::size_t j = n; j >= 1; --j) {
        if (j <= n - 1) tail += rows_[n - 1](i - 1, j);
        rows_[n](i, j) = (1 - tail) / n;
      }
    }
  }
}

Rational p_tilde_recurrence(std::size_t n, std::size_t i, std::size_t j, std::size_t max_n) {
  if (n > max_n) {
    throw ResourceLimit("exact p~ is capped at n <= " + std::to_string(max_n) + "; use float mode");
  }
  return p_tilde_cone<Rational>(n, i, j);
}

double p_tilde_recurrence_float(std::size_t n, std::size_t i, std::size_t j) {
  return p_tilde_cone<double>(n, i, j);
}

Rational p_tilde_formula_s1(std::size_t n, std::size_t i, std::size_t j) {
  const std::int64_t big_m = upper_index(n, i, j);
  const auto nn = static_cast<std::int64_t>(n), jj = static_cast<std::int64_t>(j);
  Rational sum = 0;
  for (std::int64_t r = 1; r <= big_m; ++r) {
    const Rational term = Rational(binomial(nn - jj + r - 1, r - 1)) / Rational(falling(nn, r));
    sum += (r % 2 ? -term : term);
  }
  return sum;
}

Rational p_tilde_formula_s2(std::size_t n, std::size_t i, std::size_t j) {
  const std::int64_t big_m = upper_index(n, i, j);
  const auto nn = static_cast<std::int64_t>(n), jj = static_cast<std::int64_t>(j);
  Rational sum = 0;
  for (std::int64_t s = 0; s <= big_m; ++s) {
    const Rational term = Rational(binomial(nn - jj, s)) / Rational(falling(nn, s));
    sum += (s % 2 ? -term : term);
  }
  return sum;
}

Rational p_tilde_formula_full(std::size_t n, std::size_t i, std::size_t j) {
  return p_tilde_formula_s1(n, i, j) + p_tilde_formula_s2(n, i, j);
}

namespace {

template <typename Formula>
std::vector<FormulaMismatch> compare_with(std::size_t n_max, Formula formula) {
  const PTildeTable table(n_max);
  std::vector<FormulaMismatch> out;
  for (std::size_t n = 2; n <= n_max; ++n) {
    for (std::size_t i = 2; i <= n; ++i) {
      for (std::size_t j = 1; j <= n; ++j) {
        Rational f = formula(n, i, j);
        if (f != table(n, i, j)) out.push_back({n, i, j, table(n, i, j), std::move(f)});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<FormulaMismatch> compare_p_tilde_s2(std::size_t n_max) {
  return compare_with(n_max, p_tilde_formula_s2);
}

std::vector<FormulaMismatch> compare_p_tilde_full(std::size_t n_max) {
  return compare_with(n_max, p_tilde_formula_full);
}

DensityReport asymptotic_density_check(std::size_t n, double x, double y, std::size_t enumeration_cap) {
  if (!(y > 0.0 && y <= 1.0 && x > 0.0 && x < curve_x(y))) {
    throw DomainError("density check needs 0 < y <= 1 and 0 < x < y e^{1-y}");
  }
  DensityReport rep{};
  rep.n = n;
  rep.x = x;
  rep.y = y;
  rep.i = std::max<std::size_t>(1, scaled_ceil(x, n));
  rep.j = std::max<std::size_t>(1, scaled_ceil(y, n));
  rep.target = std::exp(y - 1.0);
  rep.scaled_p_tilde = static_cast<double>(n) * p_tilde_recurrence_float(n, rep.i, rep.j);
  rep.p_tilde_error = rep.scaled_p_tilde - rep.target;
  if (n <= enumeration_cap) {
    const ProbabilityTables tables = enumerate_tables(n, 1, enumeration_cap);
    rep.scaled_p_prime = static_cast<double>(n) * tables.p_prime(rep.i, rep.j).convert_to<double>();
    rep.p_prime_error = *rep.scaled_p_prime - rep.target;
  }
  return rep;
}

}  // namespace runsort
