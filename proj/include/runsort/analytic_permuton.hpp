#pragma once

namespace runsort {

/// Axis-parallel rectangle [x1, x2] x [y1, y2] inside the unit square.
struct Rectangle {
  double x1, x2, y1, y2;

  /// Validates 0 <= x1 <= x2 <= 1 and 0 <= y1 <= y2 <= 1.
  static Rectangle make(double x1, double x2, double y1, double y2);
  static constexpr Rectangle unit() { return {0.0, 1.0, 0.0, 1.0}; }
};

struct MassComponents {
  double ac_mass = 0.0;
  double singular_mass = 0.0;
  double total() const { return ac_mass + singular_mass; }
};

/// x = y e^{1-y}, the boundary curve of the support.
double curve_x(double y);

/// The limit permuton of runsort on uniform permutations: density e^{y-1}
/// strictly above the curve x = y e^{1-y}, plus a line mass with density
/// (1 - y) dy on the curve. Half the mass sits on each part.
class RunsortPermuton {
 public:
  explicit RunsortPermuton(double inversion_tolerance = 1e-12)
      : inversion_tolerance_(inversion_tolerance) {}

  double inversion_tolerance() const { return inversion_tolerance_; }

  /// The y in [0, 1] with curve_x(y) = x.
  double curve_inverse(double x) const;

  MassComponents rect_mass_components(const Rectangle& box) const;
  double rect_mass(const Rectangle& box) const { return rect_mass_components(box).total(); }

  /// Mass of [0, x] x [0, y].
  double cdf(double x, double y) const;

 private:
  double inversion_tolerance_;
};

}  // namespace runsort
