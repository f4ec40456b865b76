#pragma once

#include "magnls/asymptotics.hpp"
#include "magnls/solver.hpp"

namespace magnls {

/// Configuration of the winding ansatz u_k = C_k ((x2 + i x1)/rho)^k v_k
/// for tangential-only magnetic potentials A = c(rho) e_tau. Rejects
/// x3-dependent c and nonzero normal/axial components at construction.
struct VortexConfig {
  int k = 0;
  double amplitude = 1.0;  // C_k; solves run at 1 and rescale exactly
  CylMagneticPotential magnetic;
  ScalarPotential scalar;
  double p = 4.0;

  static VortexConfig make(int k, double amplitude,
                           const CylMagneticPotential& magnetic,
                           const ScalarPotential& scalar, double p);
};

/// Effective potential W_k = (k eps / rho + c(rho))^2 + V(rho, x3).
double effective_potential(const VortexConfig& cfg, double eps, double rho,
                           double x3);

/// inf over the closed domain of theta c^2 + V; positive values admit the
/// critical-frequency scenario (checked with theta = 0.9 by callers).
double critical_frequency_margin(const VortexConfig& cfg,
                                 const ConcentrationDomain& dom,
                                 double theta = 0.9, int samples = 512);

struct VortexSolveResult {
  SolveResult solve;       // real field, amplitude already rescaled by C_k
  double m_at_peak = 0.0;  // normalized concentration function at the peak
};

/// Real positive critical point of the penalized functional with W_k in
/// place of c^2 + V and no magnetic components in the reduced operator.
/// Internally solves with unit amplitude and applies the exact
/// gamma^{-1/(p-2)} rescaling for general C_k.
VortexSolveResult solve_vortex(const VortexConfig& cfg, double eps,
                               const HalfPlaneGrid& grid,
                               const PenalizationParams& pen,
                               const ConcentrationDomain& dom,
                               const SolveConfig& solver_cfg,
                               std::optional<std::pair<double, double>>
                                   center = std::nullopt);

/// Discrete residual identity between the reconstructed 3D field and the
/// reduced real problem, sampled on theta slices: both sides share the
/// (rho, x3) stencil, so the reported difference isolates the angular
/// discretization of the winding phase.
struct ReconstructionReport {
  double max_residual_diff = 0.0;  // max over theta samples and nodes
  double max_reduced_residual = 0.0;
  int theta_samples = 0;
};
ReconstructionReport reconstruct_vortex(const VortexConfig& cfg, double eps,
                                        const ComplexField& v_k,
                                        int theta_samples = 8);

}  // namespace magnls
