#pragma once

#include <utility>
#include <vector>

#include "magnls/grid.hpp"
#include "magnls/potentials.hpp"

namespace magnls {

/// Immutable discretization of the cylindrically reduced penalized problem
/// at one value of the semiclassical parameter. All nodal coefficient
/// tables are precomputed at construction; evaluation is pure and safe to
/// share across workers.
class ReducedContext {
 public:
  ReducedContext(double eps, const HalfPlaneGrid& grid,
                 CylMagneticPotential magnetic, ScalarPotential scalar,
                 PenalizationParams pen, ConcentrationDomain dom, double p);

  double eps() const { return eps_; }
  double p() const { return p_; }
  const HalfPlaneGrid& grid() const { return grid_; }
  const CylMagneticPotential& magnetic() const { return magnetic_; }
  const ScalarPotential& scalar() const { return scalar_; }
  const PenalizationParams& penalization() const { return pen_; }
  const ConcentrationDomain& domain() const { return dom_; }
  bool penalization_disabled() const { return penalization_disabled_; }

  /// c^2 + V at a node.
  double potential_coef(std::size_t id) const { return pot_coef_[id]; }
  /// eps^2 H + mu V at a node (the growth cap outside Lambda).
  double penalty_cap(std::size_t id) const { return pen_cap_[id]; }
  bool node_in_lambda(std::size_t id) const { return in_lambda_[id] != 0; }
  double node_weight(std::size_t id) const { return weight_[id]; }

  /// Penalized nonlinearity g(x, s) and its primitive G(x, s) =
  /// (1/2) Int_0^s g. Both branch sharply on the node-in-set indicator.
  double nonlinearity(double rho, double x3, double s) const;
  double primitive(double rho, double x3, double s) const;
  double nonlinearity_at(std::size_t id, double s) const;
  double primitive_at(std::size_t id, double s) const;

  // Internal tables (exposed for the hot solver loops).
  const std::vector<double>& weights() const { return weight_; }
  const std::vector<double>& potential_table() const { return pot_coef_; }
  const std::vector<double>& cap_table() const { return pen_cap_; }
  const std::vector<double>& crossing_table() const { return crossing_; }
  const std::vector<unsigned char>& lambda_mask() const { return in_lambda_; }
  const std::vector<double>& phi_rho_edges() const { return phi_edge_; }
  const std::vector<double>& a3_x3_edges() const { return a3_edge_; }
  const std::vector<double>& rho_edge_weights() const { return wr_edge_; }
  const std::vector<double>& x3_edge_weights() const { return wz_edge_; }

 private:
  double eps_;
  HalfPlaneGrid grid_;
  CylMagneticPotential magnetic_;
  ScalarPotential scalar_;
  PenalizationParams pen_;
  ConcentrationDomain dom_;
  double p_;
  bool penalization_disabled_ = false;

  std::vector<double> pot_coef_;
  std::vector<double> pen_cap_;
  std::vector<double> crossing_;  // s* with f(s*) = cap
  std::vector<unsigned char> in_lambda_;
  std::vector<double> weight_;
  std::vector<double> phi_edge_;  // phi at rho-edge midpoints
  std::vector<double> a3_edge_;   // a3 at x3-edge midpoints
  std::vector<double> wr_edge_;   // 2 pi rho_{i+1/2} h_rho h_x3 tau_j
  std::vector<double> wz_edge_;   // 2 pi rho_i tau_i h_rho h_x3
};

/// Centered-difference components of the magnetic derivative,
/// ((i eps d_rho + phi) u, (i eps d_x3 + a3) u), one-sided on the edges.
std::pair<ComplexField, ComplexField> magnetic_gradient(
    const ReducedContext& ctx, const ComplexField& u);

/// Value of the reduced quadratic form
///   2 pi IntInt [ |(i eps grad + (phi, a3)) u|^2 + (c^2+V)|u|^2 ] rho drho dx3,
/// i.e. the squared magnetic-Sobolev norm of the cylindrically symmetric
/// extension. Kinetic terms are assembled on cell edges (midpoint rho
/// weight); potential terms use the nodal trapezoid rule.
double energy_norm(const ReducedContext& ctx, const ComplexField& u);

/// Kinetic and potential parts of energy_norm, for the inequality checks.
struct EnergySplit {
  double kinetic = 0.0;
  double potential = 0.0;
  double total() const { return kinetic + potential; }
};
EnergySplit energy_norm_split(const ReducedContext& ctx, const ComplexField& u);

/// Penalized action J(u) = (1/2) energy_norm - Int G(x, |u|^2).
double penalized_energy(const ReducedContext& ctx, const ComplexField& u);

/// Riesz representative of J'(u) in the 2 pi rho-weighted nodal inner
/// product: <grad, v>_w equals the Gateaux derivative of J at u along v
/// for every interior v. Boundary nodes are zeroed (Dirichlet space).
ComplexField penalized_gradient(const ReducedContext& ctx,
                                const ComplexField& u);

/// As penalized_gradient but for the quadratic part only; used for step
/// size estimation by power iteration.
ComplexField quadratic_gradient(const ReducedContext& ctx,
                                const ComplexField& u);

/// Largest eigenvalue estimate of the weighted quadratic-form operator by
/// power iteration (iters steps from a seeded random field).
double quadratic_form_lambda_max(const ReducedContext& ctx, int iters = 20,
                                 std::uint64_t seed = 0x17);

}  // namespace magnls
