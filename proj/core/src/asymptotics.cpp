#include "magnls/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace magnls {

namespace {

double quadratic_refine(double fm, double f0, double fp, double h) {
  const double denom = fm - 2.0 * f0 + fp;
  if (denom >= 0.0) return 0.0;  // not a local max in this direction
  const double delta = 0.5 * (fm - fp) / denom;
  return std::clamp(delta, -0.5, 0.5) * h;
}

double bilinear_modulus(const ComplexField& u, double rho, double x3) {
  const HalfPlaneGrid& g = u.grid;
  const double fi = (rho - g.rho_min) / g.h_rho();
  const double fj = (x3 - g.x3_min) / g.h_x3();
  const int i = std::clamp(int(std::floor(fi)), 0, g.n_rho - 2);
  const int j = std::clamp(int(std::floor(fj)), 0, g.n_x3 - 2);
  const double tr = std::clamp(fi - i, 0.0, 1.0);
  const double tz = std::clamp(fj - j, 0.0, 1.0);
  const double v00 = std::abs(u.at(i, j));
  const double v01 = std::abs(u.at(i, j + 1));
  const double v10 = std::abs(u.at(i + 1, j));
  const double v11 = std::abs(u.at(i + 1, j + 1));
  return (1 - tr) * ((1 - tz) * v00 + tz * v01) +
         tr * ((1 - tz) * v10 + tz * v11);
}

}  // namespace

PeakInfo find_peak(const ComplexField& u) {
  const HalfPlaneGrid& g = u.grid;
  int bi = -1, bj = -1;
  double best = 0.0;
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const double a = std::abs(u.at(i, j));
      if (a > best) {
        best = a;
        bi = i;
        bj = j;
      }
    }
  }
  if (bi < 0) throw std::runtime_error("find_peak: field is identically zero");

  PeakInfo peak;
  peak.value = best;
  peak.rho = g.rho(bi);
  peak.x3 = g.x3(bj);
  if (bi > 0 && bi + 1 < g.n_rho) {
    peak.rho += quadratic_refine(std::abs(u.at(bi - 1, bj)), best,
                                 std::abs(u.at(bi + 1, bj)), g.h_rho());
  }
  if (bj > 0 && bj + 1 < g.n_x3) {
    peak.x3 += quadratic_refine(std::abs(u.at(bi, bj - 1)), best,
                                std::abs(u.at(bi, bj + 1)), g.h_x3());
  }
  return peak;
}

ProfileComparison rescaled_profile_error(const ComplexField& u,
                                         const PeakInfo& peak, double eps,
                                         const GroundState1D& gs,
                                         double window, double sample_step) {
  const HalfPlaneGrid& g = u.grid;
  ProfileComparison cmp;
  const double w_max = gs.height();
  const int n = int(std::ceil(window / sample_step));
  for (int a = -n; a <= n; ++a) {
    for (int b = -n; b <= n; ++b) {
      const double y1 = a * sample_step, y2 = b * sample_step;
      const double rad = std::hypot(y1, y2);
      if (rad > window) continue;
      const double rho = peak.rho + eps * y1;
      const double x3 = peak.x3 + eps * y2;
      if (rho < g.rho_min || rho > g.rho_max || x3 < g.x3_min ||
          x3 > g.x3_max) {
        cmp.truncated = true;
        continue;
      }
      const double diff =
          std::abs(bilinear_modulus(u, rho, x3) - gs.eval(rad));
      cmp.max_error = std::max(cmp.max_error, diff / w_max);
    }
  }
  return cmp;
}

int count_penalization_violations(const ReducedContext& ctx,
                                  const ComplexField& u) {
  const double e = 0.5 * (ctx.p() - 2.0);
  const auto& mask = ctx.lambda_mask();
  const auto& cap = ctx.cap_table();
  int count = 0;
  for (std::size_t id = 0; id < u.values.size(); ++id) {
    if (mask[id]) continue;
    const double s = std::norm(u.values[id]);
    if (std::pow(s, e) > cap[id]) ++count;
  }
  return count;
}

DecayFit fit_decay_envelope(const ComplexField& u, const PeakInfo& peak,
                            double eps, const DecayFitOptions& opts) {
  const HalfPlaneGrid& g = u.grid;
  const double floor = opts.noise_floor_rel * peak.value;

  // Collect fit nodes and pin the constant just above sup |u|(1+|x|).
  struct Node {
    double y;  // log(|u| (1+|x|))
    double z;  // d/(1+d)
  };
  std::vector<Node> nodes;
  double sup = 0.0;
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const double a = std::abs(u.at(i, j));
      if (a < floor) continue;
      const double rho = g.rho(i), z3 = g.x3(j);
      const double envelope = a * (1.0 + std::hypot(rho, z3));
      sup = std::max(sup, envelope);
      const double d = cyl_distance(rho, z3, peak.rho, peak.x3);
      if (d <= 0.0) continue;
      nodes.push_back(Node{std::log(envelope), d / (1.0 + d)});
    }
  }
  if (nodes.size() < 8) {
    throw std::runtime_error("fit_decay_envelope: too few nodes above floor");
  }

  DecayFit fit;
  fit.nodes = int(nodes.size());

  // Unconstrained least-squares line through (z, y); on exact envelope
  // data this recovers the generating rate.
  double sy = 0.0, sz = 0.0, syz = 0.0, szz = 0.0;
  for (const Node& nd : nodes) {
    sy += nd.y;
    sz += nd.z;
    syz += nd.y * nd.z;
    szz += nd.z * nd.z;
  }
  const double n = double(nodes.size());
  const double var = szz - sz * sz / n;
  const double slope = var > 0.0 ? (syz - sy * sz / n) / var : 0.0;
  fit.lambda_ls = -eps * slope;

  // Certified envelope: constant pinned just above the data sup, rate the
  // largest value keeping the bound valid at every fit node. The sup
  // anchor makes the certificate conservative: the rate it can certify is
  // limited by the flat profile core, not by the far-field decay.
  const double logC = std::log(sup) + std::log1p(opts.constant_margin);
  fit.C = std::exp(logC);
  double lambda_min = std::numeric_limits<double>::infinity();
  for (const Node& nd : nodes) {
    lambda_min = std::min(lambda_min, eps * (logC - nd.y) / nd.z);
  }
  fit.lambda_fit = lambda_min;
  return fit;
}

BarrierCheck barrier_inequality_check(const ReducedContext& ctx,
                                      const PeakInfo& peak, double lambda,
                                      double R, double r, double tol) {
  const ConcentrationDomain& dom = ctx.domain();
  if (lambda <= 0.0 || R <= 0.0 || r <= 0.0) {
    throw std::domain_error("barrier_inequality_check: bad parameters");
  }
  if (!dom.contains(peak.rho, peak.x3) ||
      dom.boundary_distance(peak.rho, peak.x3) < R) {
    throw std::domain_error(
        "barrier_inequality_check: B_cyl(peak, R) must sit inside Lambda");
  }
  if (ctx.eps() * r >= R) {
    throw std::domain_error("barrier_inequality_check: eps*r must be < R");
  }

  const HalfPlaneGrid& g = ctx.grid();
  const double eps = ctx.eps();
  const double eps2 = eps * eps;
  const double hr = g.h_rho(), hz = g.h_x3();
  const auto Phi = [&](double rho, double x3) {
    const double d = cyl_distance(rho, x3, peak.rho, peak.x3);
    return std::cosh(lambda * (R - d) / eps);
  };

  BarrierCheck out;
  out.min_value = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (int i = 1; i + 1 < g.n_rho; ++i) {
    const double rho = g.rho(i);
    for (int j = 1; j + 1 < g.n_x3; ++j) {
      const double z = g.x3(j);
      const double d = cyl_distance(rho, z, peak.rho, peak.x3);
      if (d <= eps * r || d >= R) continue;
      const double phi0 = Phi(rho, z);
      // Cylindrical Laplacian with rho-weighted fluxes.
      const double rp = rho + 0.5 * hr, rm = rho - 0.5 * hr;
      const double lap_r = (rp * (Phi(rho + hr, z) - phi0) -
                            rm * (phi0 - Phi(rho - hr, z))) /
                           (rho * hr * hr);
      const double lap_z =
          (Phi(rho, z + hz) - 2.0 * phi0 + Phi(rho, z - hz)) / (hz * hz);
      const double H = aux_hardy_potential(ctx.penalization(), std::hypot(rho, z));
      const double V = ctx.scalar().eval(rho, z);
      const double value = -eps2 * (lap_r + lap_z + H * phi0) +
                           (1.0 - ctx.penalization().mu) * V * phi0;
      out.min_value = std::min(out.min_value, value);
      scale = std::max(scale, std::abs(value));
      ++out.nodes;
    }
  }
  if (out.nodes == 0) {
    throw std::domain_error("barrier_inequality_check: empty annulus on grid");
  }
  out.pass = out.min_value >= -tol * std::max(scale, 1.0);
  return out;
}

namespace {

// Warm start: previous solution stretched about its peak by the ratio of
// the two semiclassical parameters, bilinearly resampled.
ComplexField rescale_about_peak(const ComplexField& prev, const PeakInfo& peak,
                                double eps_prev, double eps_new) {
  const HalfPlaneGrid& g = prev.grid;
  const double ratio = eps_prev / eps_new;
  ComplexField out(g);
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const double rho = peak.rho + ratio * (g.rho(i) - peak.rho);
      const double x3 = peak.x3 + ratio * (g.x3(j) - peak.x3);
      if (rho < g.rho_min || rho > g.rho_max || x3 < g.x3_min ||
          x3 > g.x3_max) {
        continue;
      }
      // Bilinear resample of the complex values.
      const double fi = (rho - g.rho_min) / g.h_rho();
      const double fj = (x3 - g.x3_min) / g.h_x3();
      const int ii = std::clamp(int(std::floor(fi)), 0, g.n_rho - 2);
      const int jj = std::clamp(int(std::floor(fj)), 0, g.n_x3 - 2);
      const double tr = std::clamp(fi - ii, 0.0, 1.0);
      const double tz = std::clamp(fj - jj, 0.0, 1.0);
      out.at(i, j) = (1 - tr) * ((1 - tz) * prev.at(ii, jj) +
                                 tz * prev.at(ii, jj + 1)) +
                     tr * ((1 - tz) * prev.at(ii + 1, jj) +
                           tz * prev.at(ii + 1, jj + 1));
    }
  }
  out.zero_boundary();
  return out;
}

}  // namespace

SweepReport run_sweep(const HalfPlaneGrid& grid,
                      const CylMagneticPotential& magnetic,
                      const ScalarPotential& scalar,
                      const PenalizationParams& pen,
                      const ConcentrationDomain& dom, double p,
                      const std::vector<double>& eps_list,
                      const SweepConfig& cfg,
                      std::vector<ComplexField>* fields) {
  if (eps_list.empty()) throw std::invalid_argument("run_sweep: empty eps list");
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    if (eps_list[k] >= eps_list[k - 1]) {
      throw std::invalid_argument("run_sweep: eps list must be decreasing");
    }
  }

  SweepReport report;
  const auto handle =
      make_concentration_handle(magnetic, scalar, p, MNormalization::kWith2Pi);
  const ConcentrationMinimum m = minimize_concentration(handle, dom);
  report.m_inf_segment = m.m_min_segment;

  // Lambda rate for the barrier check from the domain-infimum of V.
  const auto lam_rep = check_lambda_conditions(
      dom, [&](double r, double z) { return handle.value(r, z); }, scalar, 512);
  const double barrier_lambda =
      std::sqrt(cfg.barrier_lambda_factor * (1.0 - pen.mu) * lam_rep.inf_potential);

  std::optional<ComplexField> prev_field;
  PeakInfo prev_peak;
  double prev_eps = 0.0;

  for (double eps : eps_list) {
    const ReducedContext ctx(eps, grid, magnetic, scalar, pen, dom, p);
    SweepRecord rec;
    rec.eps = eps;

    SolveResult sol;
    if (prev_field) {
      ComplexField init =
          rescale_about_peak(*prev_field, prev_peak, prev_eps, eps);
      sol = solve_penalized(ctx, cfg.solver, init);
      if (!sol.converged()) {
        sol = solve_from_center(ctx, cfg.solver);
      }
    } else {
      sol = solve_from_center(ctx, cfg.solver);
    }

    rec.converged = sol.converged();
    rec.residual = sol.residual;
    rec.iterations = sol.iterations;
    rec.c_eps = sol.c_eps;
    rec.c_eps_over_eps2 = sol.c_eps / (eps * eps);
    rec.peak_rho = sol.peak_rho;
    rec.peak_x3 = sol.peak_x3;
    rec.peak_value = sol.peak_value;
    if (!rec.converged) {
      report.all_converged = false;
      report.records.push_back(rec);
      continue;
    }

    rec.m_at_peak = handle.value(sol.peak_rho, sol.peak_x3);
    const double c_pk = magnetic.c(sol.peak_rho, sol.peak_x3);
    const double a0_pk =
        c_pk * c_pk + scalar.eval(sol.peak_rho, sol.peak_x3);
    const GroundState1D gs = solve_limit_ground_state(a0_pk, p);
    const PeakInfo peak{sol.peak_rho, sol.peak_x3, sol.peak_value};
    rec.profile_error =
        rescaled_profile_error(sol.field, peak, eps, gs).max_error;
    rec.penalization_violations =
        count_penalization_violations(ctx, sol.field);
    const DecayFit decay = fit_decay_envelope(sol.field, peak, eps);
    rec.decay_lambda = decay.lambda_fit;
    rec.decay_constant = decay.C;

    double R = cfg.barrier_ball_radius;
    if (R <= 0.0) {
      R = 0.5 * dom.boundary_distance(sol.peak_rho, sol.peak_x3);
    }
    if (R > eps * cfg.barrier_core_radius) {
      rec.barrier_pass =
          barrier_inequality_check(ctx, peak, barrier_lambda, R,
                                   cfg.barrier_core_radius)
              .pass;
    }

    prev_field = sol.field;
    prev_peak = peak;
    prev_eps = eps;
    if (fields) fields->push_back(sol.field);
    report.records.push_back(rec);
  }
  return report;
}

}  // namespace magnls
