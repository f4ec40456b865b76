#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "magnls/geometry.hpp"

namespace magnls {

/// Rectilinear table with bilinear interpolation, loaded from CSV
/// (header `rho,x3,value`, row-major). Queries outside the table clamp
/// to the nearest edge.
class Table2D {
 public:
  Table2D() = default;
  Table2D(std::vector<double> rho, std::vector<double> x3,
          std::vector<double> values);

  static Table2D from_csv(const std::string& path);

  double eval(double rho, double x3) const;
  bool empty() const { return values_.empty(); }
  double rho_min() const { return rho_.front(); }
  double rho_max() const { return rho_.back(); }
  double x3_min() const { return x3_.front(); }
  double x3_max() const { return x3_.back(); }

 private:
  std::vector<double> rho_;
  std::vector<double> x3_;
  std::vector<double> values_;  // values_[i*n_x3 + j]
};

enum class MagneticFamily { kConstantField, kTangentialPower, kCustomTabulated };

/// Equivariant vector potential in the (e_n, e_tau, e_3) frame:
///   A = phi(rho,|x3|) e_n + c(rho,|x3|) e_tau + a3(rho,x3) e_3.
/// phi and c see x3 only through |x3|; a3 is odd in x3 for the analytic
/// families. Tabulated components are taken as given so that broken
/// symmetry can be detected rather than silently repaired.
struct CylMagneticPotential {
  MagneticFamily family = MagneticFamily::kConstantField;
  double field_strength = 1.0;   // constant-field: c = field_strength*rho/2
  double tangential_coef = 0.0;  // tangential-power: c = coef*rho^power
  double tangential_exponent = 1.0;
  /// Additive 1/rho tangential term; the winding ansatz folds its angular
  /// momentum into the connection through this coefficient.
  double tangential_inverse_coef = 0.0;
  std::shared_ptr<const Table2D> phi_table;
  std::shared_ptr<const Table2D> c_table;
  std::shared_ptr<const Table2D> a3_table;

  static CylMagneticPotential constant_field(double b);
  static CylMagneticPotential tangential_power(double coef, double power);
  static CylMagneticPotential tabulated(std::shared_ptr<const Table2D> phi,
                                        std::shared_ptr<const Table2D> c,
                                        std::shared_ptr<const Table2D> a3);
  static CylMagneticPotential zero_field() { return constant_field(0.0); }

  double phi(double rho, double x3) const;
  double c(double rho, double x3) const;
  double a3(double rho, double x3) const;
};

/// A(x) in Cartesian components, with the frame evaluated at theta(x).
/// Throws std::domain_error on the symmetry axis (rho = 0).
Vec3 eval_vector_potential(const CylMagneticPotential& pot, const Point3& x);

enum class ScalarFamily {
  kConstant,
  kCylindricalHardy,  // strength / rho^alpha
  kRadialPower,       // strength / |x|^alpha
  kCompactBump,       // strength * (1 - d^2/r^2)^2 on d < r, else 0
  kZeroMinimumWell,   // scale * ((rho - rho_center)^2 + x3^2)
};

/// Nonnegative cylindrically invariant electric potential with optional
/// decay/singularity exponent tags.
struct ScalarPotential {
  ScalarFamily family = ScalarFamily::kConstant;
  double strength = 1.0;
  double alpha = 2.0;        // exponent for the power families
  double rho_center = 1.0;   // compact-bump / zero-minimum-well
  double radius = 1.0;       // compact-bump support radius
  std::optional<double> alpha_inf;   // declared far-field exponent
  std::optional<double> alpha_zero;  // declared exponent at the origin

  static ScalarPotential constant(double v);
  static ScalarPotential cylindrical_hardy(double strength, double alpha);
  static ScalarPotential radial_power(double strength, double alpha);
  static ScalarPotential compact_bump(double strength, double rho_center,
                                      double radius);
  static ScalarPotential zero_minimum_well(double scale, double rho_center);

  double eval(double rho, double x3) const;
};

/// Penalization constants. kappa must stay below ((N-2)/2)^2 = 1/4 in
/// dimension three; mid-range defaults keep max{mu, 4 kappa} < 1.
struct PenalizationParams {
  double mu = 0.5;
  double kappa = 0.2;
  double beta = 1.0;

  bool valid() const {
    return mu > 0.0 && mu < 1.0 && kappa > 0.0 && kappa < 0.25 && beta > 0.0;
  }
};

/// Auxiliary Hardy-type potential
///   H(x) = kappa / (|x|^2 ((log|x|)^2 + 1)^{(1+beta)/2}).
/// Throws std::domain_error at x = 0.
double aux_hardy_potential(const PenalizationParams& params, double dist_origin);
double aux_hardy_potential(const PenalizationParams& params, const Point3& x);

struct EquivarianceReport {
  double max_violation = 0.0;
  int samples = 0;
  bool pass = false;
};

/// Samples random group elements g (rotation + optional reflection) and
/// off-axis points, and reports max |g A(g^{-1}x) - A(x)|.
EquivarianceReport check_equivariance(const CylMagneticPotential& pot,
                                      int sample_count, double tol = 1e-10,
                                      std::uint64_t seed = 0x5eed);

struct LambdaConditionsReport {
  double inf_segment = 0.0;        // inf of M over Lambda intersect {x3=0}
  double inf_segment_boundary = 0.0;
  double inf_domain = 0.0;         // inf of M over the closed rectangle
  double inf_potential = 0.0;      // inf of V over the closed rectangle
  bool interior_below_boundary = false;  // inf_seg < inf over boundary circles
  bool interior_below_twice_domain = false;
  bool potential_positive = false;
  bool all_pass() const {
    return interior_below_boundary && interior_below_twice_domain &&
           potential_positive;
  }
};

/// Checks the admissibility of a concentration domain against a scalar
/// concentration-function handle mfun(rho, x3). Infima by dense sampling
/// (samples_per_edge points) refined by golden-section search.
LambdaConditionsReport check_lambda_conditions(
    const ConcentrationDomain& dom,
    const std::function<double(double, double)>& mfun,
    const ScalarPotential& V, int samples_per_edge = 2048);

}  // namespace magnls
