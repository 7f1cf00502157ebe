#include "runsort/analytic_permuton.hpp"

#include <algorithm>
#include <cmath>

#include "runsort/errors.hpp"

namespace runsort {

namespace {

bool in_unit(double t) { return t >= 0.0 && t <= 1.0; }

// Antiderivative of e^{t-1}.
double exp_m1(double t) { return std::exp(t - 1.0); }

}  // namespace

Rectangle Rectangle::make(double x1, double x2, double y1, double y2) {
  if (!(in_unit(x1) && in_unit(x2) && in_unit(y1) && in_unit(y2) && x1 <= x2 && y1 <= y2)) {
    throw InvalidInput("rectangle must satisfy 0 <= x1 <= x2 <= 1 and 0 <= y1 <= y2 <= 1");
  }
  return {x1, x2, y1, y2};
}

double curve_x(double y) {
  if (!in_unit(y)) throw InvalidInput("curve_x: y must lie in [0, 1]");
  return y * std::exp(1.0 - y);
}

double RunsortPermuton::curve_inverse(double x) const {
  if (!in_unit(x)) throw InvalidInput("curve_inverse: x must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  // curve_x is increasing on [0, 1] with derivative (1 - y) e^{1-y}, which
  // vanishes at y = 1; Newton steps are only taken when they stay inside the
  // current bracket.
  double lo = 0.0;
  double hi = 1.0;
  double y = x / std::exp(1.0);
  for (int iter = 0; iter < 200 && hi - lo > inversion_tolerance_; ++iter) {
    const double e = std::exp(1.0 - y);
    const double f = y * e - x;
    if (f == 0.0) return y;
    if (f < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    const double slope = (1.0 - y) * e;
    double next = slope > 0.0 ? y - f / slope : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 0.25 * inversion_tolerance_) {
      return next;
    }
    y = next;
  }
  return std::clamp(y, lo, hi);
}

MassComponents RunsortPermuton::rect_mass_components(const Rectangle& b) const {
  MassComponents m;
  // A zero-width column meets the curve in one point and the line mass has no atoms.
  if (b.x1 >= b.x2) return m;
  const double u1 = curve_inverse(b.x1);
  const double u2 = curve_inverse(b.x2);
  // For y < u1 the row {y} x [x1, x2] lies below the curve.
  // For u1 <= y < u2 the row is cut by the curve: integrand y - x1 e^{y-1}.
  // For y >= u2 the whole row is inside the support: (x2 - x1) e^{y-1}.
  const double a = std::max(b.y1, u1);
  const double c = std::min(b.y2, u2);
  if (a < c) {
    m.ac_mass += 0.5 * (c * c - a * a) - b.x1 * (exp_m1(c) - exp_m1(a));
    // The line mass (1 - y) dy over the same y-range.
    m.singular_mass = (c - a) - 0.5 * (c * c - a * a);
  }
  const double d = std::max(b.y1, u2);
  if (d < b.y2) {
    m.ac_mass += (b.x2 - b.x1) * (exp_m1(b.y2) - exp_m1(d));
  }
  return m;
}

double RunsortPermuton::cdf(double x, double y) const {
  return rect_mass(Rectangle::make(0.0, x, 0.0, y));
}

}  // namespace runsort
