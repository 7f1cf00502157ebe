#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "runsort/analytic_permuton.hpp"
#include "runsort/permutation.hpp"

namespace runsort {

/// Corner values F(I/m, J/m) of a measure's CDF on an (m+1) x (m+1) grid.
/// Empirical grids are exact: value = numerator / denominator.
struct GridCdf {
  std::size_t m = 0;
  std::int64_t denominator = 1;
  std::vector<std::int64_t> numerators;  // row-major, index I * (m + 1) + J

  std::int64_t numerator(std::size_t i, std::size_t j) const { return numerators[i * (m + 1) + j]; }
  double value(std::size_t i, std::size_t j) const {
    return static_cast<double>(numerator(i, j)) / static_cast<double>(denominator);
  }
  /// Mass of [I1/m, I2/m] x [J1/m, J2/m] by inclusion-exclusion, as a numerator.
  std::int64_t rect_numerator(std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) const {
    return numerator(i2, j2) - numerator(i1, j2) - numerator(i2, j1) + numerator(i1, j1);
  }
};

/// The measure gamma_pi: density n on the cells [(i-1)/n, i/n] x [(pi_i - 1)/n, pi_i/n].
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(Permutation perm) : perm_(std::move(perm)) {}

  std::size_t n() const { return perm_.size(); }
  const Permutation& permutation() const { return perm_; }

  /// Exact cell-overlap mass of an arbitrary rectangle (floating point).
  double rect_mass(const Rectangle& box) const;

  /// #{i : i1 < i <= i2, j1 < pi_i <= j2} for indices on the n-grid; the mass
  /// of [i1/n, i2/n] x [j1/n, j2/n] is this count over n.
  std::size_t aligned_count(std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) const;

  /// Mass of [0, I/m] x [0, J/m] in units of 1/(n m^2), by direct summation.
  std::int64_t corner_numerator(std::size_t m, std::size_t big_i, std::size_t big_j) const;

  /// All corner values in O(n + m^2) (bucket masses plus 2-D prefix sums).
  /// Throws InvalidInput for m < 1.
  GridCdf build_grid_cdf(std::size_t m) const;

 private:
  Permutation perm_;
};

/// Corner CDF values of the runsort permuton on the (m+1) x (m+1) grid,
/// row-major as in GridCdf.
std::vector<double> analytic_grid_cdf(const RunsortPermuton& permuton, std::size_t m);

struct DistanceEstimate {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t m = 0;
  /// max |F_1 - F_2| over the corners of the fine grid and its resolution.
  double corner_sup = 0.0;
  std::size_t corner_m = 0;
};

/// max over grid rectangles of |mass difference| given the corner difference
/// grid (row-major, (m+1)^2 entries). O(m^3); rows of the scan are split
/// across `threads` workers and reduced with max.
double grid_rectangle_sup(const std::vector<double>& corner_diff, std::size_t m, unsigned threads = 1);

/// Two-sided bound on d_box(gamma, R): lower is the supremum over rectangles
/// with corners on the m-grid; upper is min(lower + 8/m, 4 * corner_sup + 8/corner_m).
/// Throws InvalidInput for m < 2.
DistanceEstimate d_square_estimate(const EmpiricalMeasure& gamma, const RunsortPermuton& permuton,
                                   std::size_t m, std::size_t corner_m = 512, unsigned threads = 1);

/// Same bound between two empirical measures of equal size.
DistanceEstimate d_square_estimate(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::size_t m,
                                   std::size_t corner_m = 512, unsigned threads = 1);

}  // namespace runsort
