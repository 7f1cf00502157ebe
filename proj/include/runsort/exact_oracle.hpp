#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "runsort/analytic_permuton.hpp"

namespace runsort {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// "num/den" (or "num" when the denominator is 1).
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& text);

/// Square matrix of rationals with 1-based (i, j) access.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(std::size_t n) : n_(n), cells_(n * n) {}
  std::size_t size() const { return n_; }
  Rational& operator()(std::size_t i, std::size_t j) { return cells_[(i - 1) * n_ + (j - 1)]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return cells_[(i - 1) * n_ + (j - 1)]; }

 private:
  std::size_t n_ = 0;
  std::vector<Rational> cells_;
};

/// Exact statistics of runsort over all of S_n.
///
/// p(i, j): P[value j at position i of runsort(pi)]
/// q(i, j): same, and j begins a run of pi
/// p_prime(i, j) = p(i, j) - q(i, j)
struct ProbabilityTables {
  std::size_t n = 0;
  BigInt factorial;
  RationalMatrix p, q, p_prime;
  Rational expected_runs;
  /// l_totals[t] = sum over pi of L_{runsort(pi)} at threshold t, t in [0, n].
  std::vector<BigInt> l_totals;

  /// E[L_{runsort(pi)}(y)] with threshold floor(y n).
  Rational expected_l(double y) const;
  Rational expected_l_at(std::size_t threshold) const;
  /// E_n of the grid-aligned box [i1/n, i2/n] x [j1/n, j2/n]: (1/n) sum of p(i, j)
  /// over i1 < i <= i2, j1 < j <= j2.
  Rational expected_mass(std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) const;
};

/// Enumerates S_n in lexicographic blocks (one per leading value) spread over
/// `threads` workers; tallies are integers so the result does not depend on
/// the thread count. Throws ResourceLimit for n > max_n, InvalidInput for n < 1.
ProbabilityTables enumerate_tables(std::size_t n, unsigned threads = 1, std::size_t max_n = 9);

struct RecurrenceWitness {
  std::size_t i, j;
  Rational lhs, rhs;
};

/// Checks p'_n(i, j) = (1/n)(1 - sum_{j <= k <= n-1} p_{n-1}(i-1, k)) for
/// 2 <= i <= n, 1 <= j <= n and returns the failing cells.
/// Throws PreconditionError unless smaller.n + 1 == tables.n.
std::vector<RecurrenceWitness> verify_recurrence(const ProbabilityTables& tables,
                                                 const ProbabilityTables& smaller);

/// p~ values by the recurrence, for every n' <= n_max and 1 <= i, j <= n'.
class PTildeTable {
 public:
  explicit PTildeTable(std::size_t n_max);
  std::size_t n_max() const { return rows_.size() - 1; }
  const Rational& operator()(std::size_t n, std::size_t i, std::size_t j) const {
    return rows_[n](i, j);
  }

 private:
  std::vector<RationalMatrix> rows_;
};

/// p~_n(i, j) via the recurrence along the cone (n - r, i - r), exact.
/// Throws ResourceLimit for n > max_n.
Rational p_tilde_recurrence(std::size_t n, std::size_t i, std::size_t j, std::size_t max_n = 30);
/// Same recurrence in double precision; any n.
double p_tilde_recurrence_float(std::size_t n, std::size_t i, std::size_t j);

/// The full S1 + S2 closed form. Requires i >= 2.
Rational p_tilde_formula_full(std::size_t n, std::size_t i, std::size_t j);
/// The S2 sum alone: sum_{s=0}^{M} (-1)^s C(n-j, s) / (n (n-1) ... (n-s)).
Rational p_tilde_formula_s2(std::size_t n, std::size_t i, std::size_t j);
/// The S1 sum alone.
Rational p_tilde_formula_s1(std::size_t n, std::size_t i, std::size_t j);

struct FormulaMismatch {
  std::size_t n, i, j;
  Rational recurrence, formula;
};

/// Cells (n <= n_max, 2 <= i <= n, 1 <= j <= n) where the recurrence and the
/// S2-only (or full S1 + S2) expression disagree.
std::vector<FormulaMismatch> compare_p_tilde_s2(std::size_t n_max);
std::vector<FormulaMismatch> compare_p_tilde_full(std::size_t n_max);

struct DensityReport {
  std::size_t n, i, j;
  double x, y;
  double target;              // e^{y-1}
  double scaled_p_tilde;      // n * p~_n(i, j)
  double p_tilde_error;       // scaled_p_tilde - target
  std::optional<double> scaled_p_prime;  // n * p'_n(i, j), only when enumerated
  std::optional<double> p_prime_error;
};

/// Compares n p~_n(ceil(xn), ceil(yn)) (and n p'_n when n <= enumeration_cap)
/// with e^{y-1}. Throws DomainError unless 0 < x < y e^{1-y}, 0 < y <= 1.
DensityReport asymptotic_density_check(std::size_t n, double x, double y, std::size_t enumeration_cap = 9);

}  // namespace runsort
