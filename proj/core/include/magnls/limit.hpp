#pragma once

#include <complex>
#include <vector>

#include "magnls/geometry.hpp"
#include "magnls/potentials.hpp"

namespace magnls {

/// Radial ground state of the planar scalar problem
///   -(w'' + w'/r) + a0 w = w^{p-1},  w'(0) = 0,  w(inf) = 0,
/// sampled on a uniform grid over [0, r_max] together with its derivative.
struct GroundState1D {
  double a0 = 1.0;
  double p = 4.0;
  double r_max = 20.0;
  std::vector<double> r;
  std::vector<double> w;
  std::vector<double> dw;
  double energy = 0.0;  // action value on the Nehari manifold
  double mass = 0.0;    // planar integral of w^2

  double height() const { return w.empty() ? 0.0 : w.front(); }
  /// Linear interpolation of the profile; exponential tail beyond r_max.
  double eval(double radius) const;
};

struct ShootingOptions {
  double tol = 1e-12;        // bisection width on the shooting height
  double r_max_factor = 20.0;  // integrate to r_max_factor / sqrt(a0)
  int samples = 4097;
  double height_max = 1e3;   // bracket search gives up beyond this
};

/// Shooting solve; throws SolverFailure-style std::runtime_error when no
/// bracket exists or the tolerance cannot be met.
GroundState1D solve_limit_ground_state(double a0, double p,
                                       const ShootingOptions& opts = {});

/// (1/2 - 1/p) * 2*pi*Int (w'^2 + a0 w^2) r dr by Simpson quadrature.
double ground_energy(const GroundState1D& gs);

/// Ground energy at a0 = 1 for exponent p, computed once and cached.
double ground_energy_unit(double p);

enum class MNormalization { kWith2Pi, kNormalized };

/// Concentration landscape rho -> weight * rho * (c^2 + V)^{2/(p-2)}.
/// kWith2Pi carries the 2*pi*E(0,1) factor so values compare directly
/// with rescaled critical levels; kNormalized drops it (same minimizers).
struct ConcentrationFunctionHandle {
  CylMagneticPotential magnetic;
  ScalarPotential scalar;
  double p = 4.0;
  MNormalization normalization = MNormalization::kWith2Pi;
  double e01 = 0.0;  // filled by make_concentration_handle

  double value(double rho, double x3) const;
};

ConcentrationFunctionHandle make_concentration_handle(
    const CylMagneticPotential& magnetic, const ScalarPotential& scalar,
    double p, MNormalization normalization = MNormalization::kWith2Pi);

struct ConcentrationMinimum {
  double rho_star = 0.0;
  double x3_star = 0.0;
  double m_min_segment = 0.0;  // inf over Lambda intersect {x3 = 0}
  double m_inf_domain = 0.0;   // inf over the closed rectangle
};

/// Minimizes the handle over the x3 = 0 segment of the domain (dense scan
/// plus golden-section refinement) and samples the full rectangle infimum.
ConcentrationMinimum minimize_concentration(
    const ConcentrationFunctionHandle& handle, const ConcentrationDomain& dom,
    double tol = 1e-9, int scan_points = 4096);

/// Planar grid helpers for the constant-coefficient limit problem. Used by
/// gauge-covariance checks; the production solves live on the weighted
/// half-plane grid instead.
struct PlanarGrid {
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  int nx = 0, ny = 0;
  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return (y_max - y_min) / (ny - 1); }
  double x(int i) const { return x_min + i * hx(); }
  double y(int j) const { return y_min + j * hy(); }
  std::size_t size() const { return std::size_t(nx) * ny; }
  std::size_t idx(int i, int j) const { return std::size_t(i) * ny + j; }
};

using PlanarField = std::vector<std::complex<double>>;

enum class GaugeDirection { kAdd, kRemove };

/// Pointwise multiplication by exp(+-i A0.y); preserves the modulus exactly.
PlanarField gauge_transform(const PlanarField& u, const PlanarGrid& grid,
                            const std::array<double, 2>& a0,
                            GaugeDirection direction);

/// Value of the limit action (1/2)Int(|(i grad + A0)u|^2 + a0|u|^2) -
/// (1/p)Int|u|^p on the planar grid (staggered kinetic term, Dirichlet
/// boundary).
double limit_functional(const PlanarField& u, const PlanarGrid& grid,
                        const std::array<double, 2>& a0_vec, double a0,
                        double p);

/// Least-energy state of the limit functional by Nehari-projected descent.
/// Returns the converged field; used by gauge invariance checks and tests.
PlanarField minimize_limit_functional(const PlanarGrid& grid,
                                      const std::array<double, 2>& a0_vec,
                                      double a0, double p,
                                      int max_iters = 4000,
                                      double grad_tol = 1e-9);

}  // namespace magnls
