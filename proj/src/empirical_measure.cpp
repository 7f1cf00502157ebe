#include "runsort/empirical_measure.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "runsort/errors.hpp"

namespace runsort {

namespace {

// Length of [a, b] intersected with [c, d].
template <typename T>
T overlap(T a, T b, T c, T d) {
  const T lo = std::max(a, c);
  const T hi = std::min(b, d);
  return hi > lo ? hi - lo : T{0};
}

}  // namespace

double EmpiricalMeasure::rect_mass(const Rectangle& box) const {
  const std::size_t size = n();
  const double dn = static_cast<double>(size);
  const auto first = static_cast<std::size_t>(std::floor(box.x1 * dn));
  const auto last = std::min(size, static_cast<std::size_t>(std::ceil(box.x2 * dn)));
  double mass = 0.0;
  for (std::size_t i = first + 1; i <= last; ++i) {
    const double ox = overlap(box.x1, box.x2, (i - 1) / dn, i / dn);
    if (ox == 0.0) continue;
    const double v = perm_.at(i);
    const double oy = overlap(box.y1, box.y2, (v - 1) / dn, v / dn);
    mass += dn * ox * oy;
  }
  return mass;
}

std::size_t EmpiricalMeasure::aligned_count(std::size_t i1, std::size_t i2, std::size_t j1,
                                            std::size_t j2) const {
  std::size_t count = 0;
  i2 = std::min(i2, n());
  for (std::size_t i = i1 + 1; i <= i2; ++i) {
    const auto v = static_cast<std::size_t>(perm_.at(i));
    if (v > j1 && v <= j2) ++count;
  }
  return count;
}

std::int64_t EmpiricalMeasure::corner_numerator(std::size_t m, std::size_t big_i, std::size_t big_j) const {
  const auto nn = static_cast<std::int64_t>(n());
  const auto mm = static_cast<std::int64_t>(m);
  const std::int64_t xcut = static_cast<std::int64_t>(big_i) * nn;
  const std::int64_t ycut = static_cast<std::int64_t>(big_j) * nn;
  std::int64_t total = 0;
  for (std::int64_t i = 1; i <= nn; ++i) {
    const std::int64_t ox = overlap<std::int64_t>(0, xcut, (i - 1) * mm, i * mm);
    if (ox == 0) continue;
    const std::int64_t v = perm_.at(static_cast<std::size_t>(i));
    total += ox * overlap<std::int64_t>(0, ycut, (v - 1) * mm, v * mm);
  }
  return total;
}

GridCdf EmpiricalMeasure::build_grid_cdf(std::size_t m) const {
  if (m < 1) throw InvalidInput("grid resolution m must be >= 1");
  const auto nn = static_cast<std::int64_t>(n());
  const auto mm = static_cast<std::int64_t>(m);
  const std::size_t side = m + 1;
  GridCdf grid;
  grid.m = m;
  grid.denominator = nn * mm * mm;
  grid.numerators.assign(side * side, 0);

  // Bucket masses are written at offset (b + 1, c + 1) so the prefix sums can
  // run in place.
  auto cell = [&](std::size_t b, std::size_t c) -> std::int64_t& { return grid.numerators[b * side + c]; };
  for (std::int64_t i = 1; i <= nn; ++i) {
    const std::int64_t v = perm_.at(static_cast<std::size_t>(i));
    const std::int64_t x0 = (i - 1) * mm, x1 = i * mm;
    const std::int64_t y0 = (v - 1) * mm, y1 = v * mm;
    for (std::int64_t b = x0 / nn; b * nn < x1; ++b) {
      const std::int64_t ox = overlap(x0, x1, b * nn, (b + 1) * nn);
      for (std::int64_t c = y0 / nn; c * nn < y1; ++c) {
        cell(static_cast<std::size_t>(b + 1), static_cast<std::size_t>(c + 1)) +=
            ox * overlap(y0, y1, c * nn, (c + 1) * nn);
      }
    }
  }
  for (std::size_t i = 1; i < side; ++i) {
    for (std::size_t j = 1; j < side; ++j) {
      cell(i, j) += cell(i - 1, j) + cell(i, j - 1) - cell(i - 1, j - 1);
    }
  }
  return grid;
}

std::vector<double> analytic_grid_cdf(const RunsortPermuton& permuton, std::size_t m) {
  const std::size_t side = m + 1;
  const double dm = static_cast<double>(m);
  std::vector<double> out(side * side);
  for (std::size_t i = 0; i < side; ++i) {
    const double x = i / dm;
    const double u = permuton.curve_inverse(x);
    for (std::size_t j = 0; j < side; ++j) {
      const double y = j / dm;
      const double cap = std::min(y, u);
      double value = cap;  // cap^2/2 continuous + (cap - cap^2/2) on the curve
      if (y > u) value += x * (std::exp(y - 1.0) - std::exp(u - 1.0));
      out[i * side + j] = value;
    }
  }
  return out;
}

double grid_rectangle_sup(const std::vector<double>& diff, std::size_t m, unsigned threads) {
  const std::size_t side = m + 1;
  threads = std::max(1u, threads);
  std::vector<double> partial(threads, 0.0);
  // For fixed rows j1 < j2, h(i) = D(i, j2) - D(i, j1) and the best column
  // pair gives max(h) - min(h).
  auto work = [&](unsigned t) {
    double best = 0.0;
    for (std::size_t j1 = t; j1 < side; j1 += threads) {
      for (std::size_t j2 = j1 + 1; j2 < side; ++j2) {
        double hi = -INFINITY, lo = INFINITY;
        for (std::size_t i = 0; i < side; ++i) {
          const double h = diff[i * side + j2] - diff[i * side + j1];
          hi = std::max(hi, h);
          lo = std::min(lo, h);
        }
        best = std::max(best, hi - lo);
      }
    }
    partial[t] = best;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return *std::max_element(partial.begin(), partial.end());
}

namespace {

DistanceEstimate combine(std::size_t m, std::size_t corner_m, double lower, double corner_sup) {
  DistanceEstimate est;
  est.m = m;
  est.corner_m = corner_m;
  est.lower = lower;
  est.corner_sup = corner_sup;
  est.upper = std::min(lower + 8.0 / static_cast<double>(m),
                       4.0 * corner_sup + 8.0 / static_cast<double>(corner_m));
  est.upper = std::max(est.upper, est.lower);
  return est;
}

void check_resolutions(std::size_t m, std::size_t corner_m) {
  if (m < 2) throw InvalidInput("d_square_estimate requires m >= 2");
  if (corner_m < 1) throw InvalidInput("corner grid resolution must be >= 1");
}

}  // namespace

DistanceEstimate d_square_estimate(const EmpiricalMeasure& gamma, const RunsortPermuton& permuton,
                                   std::size_t m, std::size_t corner_m, unsigned threads) {
  check_resolutions(m, corner_m);
  auto differences = [&](std::size_t res) {
    const GridCdf emp = gamma.build_grid_cdf(res);
    std::vector<double> diff = analytic_grid_cdf(permuton, res);
    for (std::size_t k = 0; k < diff.size(); ++k) {
      diff[k] = static_cast<double>(emp.numerators[k]) / static_cast<double>(emp.denominator) - diff[k];
    }
    return diff;
  };
  const double lower = grid_rectangle_sup(differences(m), m, threads);
  double corner_sup = 0.0;
  for (double d : differences(corner_m)) corner_sup = std::max(corner_sup, std::abs(d));
  return combine(m, corner_m, lower, corner_sup);
}

DistanceEstimate d_square_estimate(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::size_t m,
                                   std::size_t corner_m, unsigned threads) {
  check_resolutions(m, corner_m);
  if (a.n() != b.n()) throw InvalidInput("empirical measures must have the same size");
  auto differences = [&](std::size_t res) {
    const GridCdf ga = a.build_grid_cdf(res);
    const GridCdf gb = b.build_grid_cdf(res);
    std::vector<double> diff(ga.numerators.size());
    for (std::size_t k = 0; k < diff.size(); ++k) {
      diff[k] = static_cast<double>(ga.numerators[k] - gb.numerators[k]) / static_cast<double>(ga.denominator);
    }
    return diff;
  };
  const double lower = grid_rectangle_sup(differences(m), m, threads);
  double corner_sup = 0.0;
  for (double d : differences(corner_m)) corner_sup = std::max(corner_sup, std::abs(d));
  return combine(m, corner_m, lower, corner_sup);
}

}  // namespace runsort
