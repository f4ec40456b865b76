#include "magnls/vortex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace magnls {

VortexConfig VortexConfig::make(int k, double amplitude,
                                const CylMagneticPotential& magnetic,
                                const ScalarPotential& scalar, double p) {
  if (amplitude <= 0.0) {
    throw std::invalid_argument("VortexConfig: amplitude must be positive");
  }
  // The ansatz needs a tangential-only potential with c = c(rho).
  const double tol = 1e-12;
  for (double rho : {0.3, 0.7, 1.1, 1.9, 2.7}) {
    for (double z : {0.0, 0.4, 1.3}) {
      if (std::abs(magnetic.phi(rho, z)) > tol ||
          std::abs(magnetic.a3(rho, z)) > tol) {
        throw std::invalid_argument(
            "VortexConfig: normal/axial components must vanish");
      }
      if (std::abs(magnetic.c(rho, z) - magnetic.c(rho, 0.0)) > tol) {
        throw std::invalid_argument(
            "VortexConfig: tangential component must not depend on x3");
      }
    }
  }
  VortexConfig cfg;
  cfg.k = k;
  cfg.amplitude = amplitude;
  cfg.magnetic = magnetic;
  cfg.scalar = scalar;
  cfg.p = p;
  return cfg;
}

double effective_potential(const VortexConfig& cfg, double eps, double rho,
                           double x3) {
  if (rho <= 0.0) {
    throw std::domain_error("effective_potential: rho must be positive");
  }
  const double shifted = cfg.k * eps / rho + cfg.magnetic.c(rho, 0.0);
  return shifted * shifted + cfg.scalar.eval(rho, x3);
}

double critical_frequency_margin(const VortexConfig& cfg,
                                 const ConcentrationDomain& dom, double theta,
                                 int samples) {
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double rho =
        dom.rho_lo + (dom.rho_hi - dom.rho_lo) * i / (samples - 1);
    const double c = cfg.magnetic.c(rho, 0.0);
    for (int j = 0; j < 65; ++j) {
      const double z = -dom.x3_half_width + 2.0 * dom.x3_half_width * j / 64;
      inf = std::min(inf, theta * c * c + cfg.scalar.eval(rho, z));
    }
  }
  return inf;
}

VortexSolveResult solve_vortex(const VortexConfig& cfg, double eps,
                               const HalfPlaneGrid& grid,
                               const PenalizationParams& pen,
                               const ConcentrationDomain& dom,
                               const SolveConfig& solver_cfg,
                               std::optional<std::pair<double, double>> center) {
  CylMagneticPotential shifted = cfg.magnetic;
  shifted.tangential_inverse_coef += cfg.k * eps;
  const ReducedContext ctx(eps, grid, shifted, cfg.scalar, pen, dom, cfg.p);

  VortexSolveResult out;
  out.solve = solve_from_center(ctx, solver_cfg, center);

  // Unit-amplitude solve; exact homogeneity gives the general-C_k field.
  if (cfg.amplitude != 1.0) {
    const double scale = 1.0 / cfg.amplitude;
    for (auto& z : out.solve.field.values) z *= scale;
    out.solve.c_eps *= scale * scale;
    out.solve.peak_value *= std::abs(scale);
  }
  const auto handle = make_concentration_handle(
      cfg.magnetic, cfg.scalar, cfg.p, MNormalization::kNormalized);
  out.m_at_peak = handle.value(out.solve.peak_rho, out.solve.peak_x3);
  return out;
}

ReconstructionReport reconstruct_vortex(const VortexConfig& cfg, double eps,
                                        const ComplexField& v_k,
                                        int theta_samples) {
  const HalfPlaneGrid& g = v_k.grid;
  const double hr = g.h_rho(), hz = g.h_x3();
  const double h_theta = std::min(hr, hz);
  const double eps2 = eps * eps;
  const double e_pow = 0.5 * (cfg.p - 2.0);
  const double coef = std::pow(std::abs(cfg.amplitude), cfg.p - 2.0);
  const Complex I(0.0, 1.0);

  // Winding phase ((x2 + i x1)/rho)^k at angle theta.
  const auto winding = [&](double theta) {
    return std::pow(Complex(std::sin(theta), std::cos(theta)),
                    double(cfg.k));
  };

  ReconstructionReport rep;
  rep.theta_samples = theta_samples;
  for (int s = 0; s < theta_samples; ++s) {
    const double theta = 2.0 * M_PI * s / theta_samples;
    const Complex phase = cfg.amplitude * winding(theta);
    const Complex phase_p = cfg.amplitude * winding(theta + h_theta);
    const Complex phase_m = cfg.amplitude * winding(theta - h_theta);
    for (int i = 1; i + 1 < g.n_rho; ++i) {
      const double rho = g.rho(i);
      const double c = cfg.magnetic.c(rho, 0.0);
      for (int j = 1; j + 1 < g.n_x3; ++j) {
        const Complex v = v_k.at(i, j);
        const Complex vr_p = v_k.at(i + 1, j), vr_m = v_k.at(i - 1, j);
        const Complex vz_p = v_k.at(i, j + 1), vz_m = v_k.at(i, j - 1);

        // Reduced residual with the plain nodal cylindrical Laplacian.
        const double rp = rho + 0.5 * hr, rm = rho - 0.5 * hr;
        const Complex lap =
            (rp * (vr_p - v) - rm * (v - vr_m)) / (rho * hr * hr) +
            (vz_p - 2.0 * v + vz_m) / (hz * hz);
        const double W =
            effective_potential(cfg, eps, rho, g.x3(j));
        const Complex r2d =
            -eps2 * lap + W * v -
            coef * std::pow(std::norm(v), e_pow) * v;

        // Reconstructed 3D residual in cylindrical coordinates; the
        // (rho, x3) stencil is shared, the theta direction is discretized.
        const Complex u = phase * v;
        const Complex u_tp = phase_p * v, u_tm = phase_m * v;
        const Complex lap3 =
            (rp * (phase * vr_p - u) - rm * (u - phase * vr_m)) /
                (rho * hr * hr) +
            (phase * vz_p - 2.0 * u + phase * vz_m) / (hz * hz) +
            (u_tp - 2.0 * u + u_tm) / (rho * rho * h_theta * h_theta);
        const Complex dtheta_u = (u_tp - u_tm) / (2.0 * h_theta);
        const Complex r3d = -eps2 * lap3 +
                            2.0 * I * eps * (c / rho) * dtheta_u +
                            (c * c + cfg.scalar.eval(rho, g.x3(j))) * u -
                            std::pow(std::norm(u), e_pow) * u;

        rep.max_residual_diff =
            std::max(rep.max_residual_diff, std::abs(r3d - phase * r2d));
        rep.max_reduced_residual =
            std::max(rep.max_reduced_residual, std::abs(r2d));
      }
    }
  }
  return rep;
}

}  // namespace magnls
