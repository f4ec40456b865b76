#pragma once

#include <array>
#include <cmath>

namespace magnls {

/// Tool version embedded in every emitted report.
inline constexpr const char* kVersion = "0.1.0";

using Point3 = std::array<double, 3>;
using Vec3 = std::array<double, 3>;

inline double cyl_radius(const Point3& x) {
  return std::hypot(x[0], x[1]);
}

/// Distance between the circles through y and z about the x3 axis.
/// Vanishes iff both points lie on the same circle.
inline double cyl_distance(const Point3& y, const Point3& z) {
  const double dr = cyl_radius(y) - cyl_radius(z);
  const double dz = y[2] - z[2];
  return std::hypot(dr, dz);
}

/// Same pseudometric in reduced (rho, x3) coordinates.
inline double cyl_distance(double rho_a, double z_a, double rho_b, double z_b) {
  return std::hypot(rho_a - rho_b, z_a - z_b);
}

/// Solid torus {rho_lo < rho < rho_hi, |x3| < x3_half_width} in reduced
/// coordinates. Kept rectangular: every experiment in scope uses a
/// rectangle, and boundary infima reduce to four edge scans.
struct ConcentrationDomain {
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  double x3_half_width = 0.0;

  bool contains(double rho, double x3) const {
    return rho > rho_lo && rho < rho_hi && std::abs(x3) < x3_half_width;
  }
  bool contains_closure(double rho, double x3) const {
    return rho >= rho_lo && rho <= rho_hi && std::abs(x3) <= x3_half_width;
  }
  /// Distance from an interior point to the rectangle boundary.
  double boundary_distance(double rho, double x3) const {
    const double d_rho = std::min(rho - rho_lo, rho_hi - rho);
    const double d_x3 = x3_half_width - std::abs(x3);
    return std::min(d_rho, d_x3);
  }
  bool valid() const {
    return rho_lo > 0.0 && rho_hi > rho_lo && x3_half_width > 0.0;
  }
};

}  // namespace magnls
