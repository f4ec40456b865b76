#include "magnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magnls/asymptotics.hpp"

namespace magnls {

namespace {

inline double pow_fast(double s, double e) {
  if (e == 1.0) return s;
  if (e == 2.0) return s * s;
  return std::pow(s, e);
}

// Per-ray data for the 1D problems along t -> t u: the ray slope
//   psi(t) = <J'(tu), tu>/t^2 = quad - t^{p-2} S_in - sum_out min(a, t^{p-2} b)
// and the action J(tu). Nonincreasing psi makes the Nehari zero unique.
struct RayCache {
  double quad = 0.0;
  double sum_inside = 0.0;  // sum_{Lambda} w s^{p/2}
  std::vector<double> a_out, b_out, s_out, cap_w_out, g_star_out, cross_out;
  double p = 4.0;

  double slope(double t) const {
    const double tp = pow_fast(t, p - 2.0);
    double pen = tp * sum_inside;
    for (std::size_t k = 0; k < a_out.size(); ++k) {
      pen += std::min(a_out[k], tp * b_out[k]);
    }
    return quad - pen;
  }

  double action(double t) const {
    const double tp = pow_fast(t, p - 2.0);
    const double t2 = t * t;
    double g_sum = tp * t2 * sum_inside / p;
    for (std::size_t k = 0; k < a_out.size(); ++k) {
      const double tt = t2 * s_out[k];
      if (tt <= cross_out[k]) {
        g_sum += tp * t2 * b_out[k] / p;
      } else {
        g_sum += g_star_out[k] + 0.5 * cap_w_out[k] * (tt - cross_out[k]);
      }
    }
    return 0.5 * t2 * quad - g_sum;
  }
};

RayCache build_ray(const ReducedContext& ctx, const ComplexField& u) {
  RayCache ray;
  ray.p = ctx.p();
  ray.quad = energy_norm(ctx, u);
  const double half_p = 0.5 * ctx.p();
  const auto& w = ctx.weights();
  const auto& mask = ctx.lambda_mask();
  const auto& cap = ctx.cap_table();
  const auto& cross = ctx.crossing_table();
  const std::size_t n = u.values.size();
  for (std::size_t id = 0; id < n; ++id) {
    const double s = std::norm(u.values[id]);
    if (s == 0.0) continue;
    const double b = w[id] * pow_fast(s, half_p);
    if (mask[id]) {
      ray.sum_inside += b;
    } else {
      ray.s_out.push_back(s);
      ray.b_out.push_back(b);
      ray.a_out.push_back(cap[id] * w[id] * s);
      ray.cap_w_out.push_back(cap[id] * w[id]);
      ray.cross_out.push_back(cross[id]);
      ray.g_star_out.push_back(w[id] * pow_fast(cross[id], half_p) / ctx.p());
    }
  }
  return ray;
}

double nehari_scale_from_ray(const RayCache& ray, double tol) {
  if (ray.quad <= 0.0) {
    throw std::runtime_error("nehari_scale: zero field");
  }
  double lo = 1.0, hi = 1.0;
  if (ray.slope(1.0) > 0.0) {
    int guard = 0;
    while (ray.slope(hi) > 0.0) {
      hi *= 2.0;
      if (++guard > 200) {
        throw std::runtime_error(
            "nehari_scale: ray-degenerate (growth capped by the penalized "
            "branch along the whole ray)");
      }
    }
    lo = hi / 2.0;
  } else {
    int guard = 0;
    while (ray.slope(lo) <= 0.0) {
      lo *= 0.5;
      if (++guard > 200) {
        throw std::runtime_error("nehari_scale: no positive slope near 0");
      }
    }
    hi = lo * 2.0;
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (ray.slope(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

double nehari_scale(const ReducedContext& ctx, const ComplexField& u,
                    double tol) {
  return nehari_scale_from_ray(build_ray(ctx, u), tol);
}

void nehari_project(const ReducedContext& ctx, ComplexField& u, double tol) {
  const double t = nehari_scale(ctx, u, tol);
  for (auto& z : u.values) z *= t;
}

ComplexField make_init_guess(const ReducedContext& ctx, double rho0,
                             double x30) {
  const ConcentrationDomain& dom = ctx.domain();
  if (!dom.contains(rho0, x30)) {
    throw std::domain_error("make_init_guess: center outside Lambda");
  }
  const double c0 = ctx.magnetic().c(rho0, x30);
  const double a0 = c0 * c0 + ctx.scalar().eval(rho0, x30);
  const GroundState1D gs = solve_limit_ground_state(a0, ctx.p());

  const double phi0 = ctx.magnetic().phi(rho0, 0.0);
  const double a30 = ctx.magnetic().a3(rho0, 0.0);
  const double eps = ctx.eps();
  const HalfPlaneGrid& g = ctx.grid();

  const double ramp_rho = 0.2 * (dom.rho_hi - dom.rho_lo);
  const double ramp_x3 = 0.2 * (2.0 * dom.x3_half_width);
  ComplexField u(g);
  for (int i = 0; i < g.n_rho; ++i) {
    const double rho = g.rho(i);
    for (int j = 0; j < g.n_x3; ++j) {
      const double z = g.x3(j);
      double cut = smoothstep((rho - dom.rho_lo) / ramp_rho) *
                   smoothstep((dom.rho_hi - rho) / ramp_rho) *
                   smoothstep((dom.x3_half_width - std::abs(z)) / ramp_x3);
      if (cut <= 0.0) continue;
      const double dist = std::hypot(rho - rho0, z - x30) / eps;
      const double amp = cut * gs.eval(dist);
      const double phase = (phi0 * (rho - rho0) + a30 * z) / eps;
      u.at(i, j) = amp * std::polar(1.0, phase);
    }
  }
  u.zero_boundary();
  return u;
}

SolveResult solve_penalized(const ReducedContext& ctx, const SolveConfig& cfg,
                            const ComplexField& init) {
  SolveResult res;
  res.field = init;
  res.field.zero_boundary();

  try {
    nehari_project(ctx, res.field, cfg.nehari_tol);
  } catch (const std::runtime_error& err) {
    res.status = SolveStatus::kRayDegenerate;
    res.message = err.what();
    return res;
  }

  const double lambda_max = quadratic_form_lambda_max(ctx);
  const double tau0 = cfg.step_rule == StepRule::kFixed && cfg.fixed_step > 0.0
                          ? cfg.fixed_step
                          : 1.0 / lambda_max;

  ComplexField grad(ctx.grid());
  ComplexField prev_u(ctx.grid()), prev_grad(ctx.grid());
  ComplexField trial(ctx.grid());
  double J_u = penalized_energy(ctx, res.field);
  if (cfg.energy_trace) cfg.energy_trace->push_back(J_u);
  double tau = tau0;
  bool have_prev = false;

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    grad = penalized_gradient(ctx, res.field);
    const double gnorm = weighted_norm(ctx.grid(), grad.values);
    const double unorm = std::sqrt(energy_norm(ctx, res.field));
    res.residual = gnorm / unorm;
    if (res.residual <= cfg.grad_tol) {
      res.status = SolveStatus::kConverged;
      break;
    }

    if (cfg.step_rule == StepRule::kArmijo && have_prev) {
      // Barzilai-Borwein trial step, clipped around the spectral estimate.
      double num = 0.0, den = 0.0;
      const auto& w = ctx.weights();
      for (std::size_t k = 0; k < grad.values.size(); ++k) {
        const Complex du = res.field.values[k] - prev_u.values[k];
        const Complex dg = grad.values[k] - prev_grad.values[k];
        num += w[k] * std::norm(du);
        den += w[k] * (du * std::conj(dg)).real();
      }
      if (den > 0.0) {
        tau = std::clamp(num / den, 1e-2 * tau0, 1e4 * tau0);
      }
    }
    prev_u = res.field;
    prev_grad = grad;
    have_prev = true;

    bool accepted = false;
    double tau_try = tau;
    for (int bt = 0; bt < 50; ++bt) {
      trial = res.field;
      for (std::size_t k = 0; k < trial.values.size(); ++k) {
        trial.values[k] -= tau_try * grad.values[k];
      }
      double J_t;
      try {
        const RayCache ray = build_ray(ctx, trial);
        const double t = nehari_scale_from_ray(ray, cfg.nehari_tol);
        for (auto& z : trial.values) z *= t;
        J_t = ray.action(t);
      } catch (const std::runtime_error&) {
        tau_try *= 0.5;
        continue;
      }
      const double slack = 1e-13 * std::abs(J_u);
      const double decrease = 1e-4 * tau_try * gnorm * gnorm;
      if (J_t <= J_u - decrease || J_t <= J_u + slack) {
        res.field.values.swap(trial.values);
        J_u = J_t;
        if (cfg.energy_trace) cfg.energy_trace->push_back(J_u);
        accepted = true;
        if (cfg.step_rule == StepRule::kFixed) {
          tau = tau0;
        } else if (tau_try == tau) {
          tau = std::min(tau * 1.2, 1e4 * tau0);
        } else {
          tau = tau_try;
        }
        break;
      }
      tau_try *= 0.5;
    }
    if (!accepted) {
      res.message = "line search stalled";
      break;
    }
  }
  res.iterations = iter;
  if (res.status != SolveStatus::kConverged) {
    grad = penalized_gradient(ctx, res.field);
    res.residual = weighted_norm(ctx.grid(), grad.values) /
                   std::sqrt(energy_norm(ctx, res.field));
    if (res.residual <= cfg.grad_tol) res.status = SolveStatus::kConverged;
  }

  res.c_eps = penalized_energy(ctx, res.field);
  const PeakInfo peak = find_peak(res.field);
  res.peak_rho = peak.rho;
  res.peak_x3 = peak.x3;
  res.peak_value = peak.value;
  return res;
}

SolveResult solve_from_center(const ReducedContext& ctx, const SolveConfig& cfg,
                              std::optional<std::pair<double, double>> center) {
  const ConcentrationDomain& dom = ctx.domain();
  const auto handle = make_concentration_handle(ctx.magnetic(), ctx.scalar(),
                                                ctx.p(), MNormalization::kWith2Pi);
  double rho0, x30;
  double bound = 0.0;
  {
    // Clamp the scan segment into the grid for penalization-disabled rigs;
    // the 10% margin rule keeps ordinary domains unaffected.
    ConcentrationDomain scan = dom;
    const double span_r = ctx.grid().rho_max - ctx.grid().rho_min;
    scan.rho_lo = std::max(dom.rho_lo, ctx.grid().rho_min + 0.1 * span_r);
    scan.rho_hi = std::min(dom.rho_hi, ctx.grid().rho_max - 0.1 * span_r);
    const ConcentrationMinimum m = minimize_concentration(handle, scan);
    rho0 = center ? center->first : m.rho_star;
    x30 = center ? center->second : m.x3_star;
    bound = ctx.eps() * ctx.eps() * m.m_min_segment;
  }

  SolveResult best = solve_penalized(ctx, cfg, make_init_guess(ctx, rho0, x30));
  if (best.converged() && best.c_eps > (1.0 + cfg.level_guard_margin) * bound &&
      cfg.max_restarts > 0 && !center) {
    const double dr = 0.15 * (dom.rho_hi - dom.rho_lo);
    const std::pair<double, double> alternates[3] = {
        {std::max(rho0 - dr, dom.rho_lo + 0.05 * dr), 0.0},
        {std::min(rho0 + dr, dom.rho_hi - 0.05 * dr), 0.0},
        {rho0, 0.25 * dom.x3_half_width}};
    for (int r = 0; r < std::min(cfg.max_restarts, 3); ++r) {
      SolveResult alt = solve_penalized(
          ctx, cfg,
          make_init_guess(ctx, alternates[r].first, alternates[r].second));
      if (!alt.converged()) continue;
      const double dist = cyl_distance(alt.peak_rho, alt.peak_x3, best.peak_rho,
                                       best.peak_x3);
      if (std::abs(alt.c_eps - best.c_eps) <=
              0.02 * std::max(std::abs(best.c_eps), 1e-300) &&
          dist > 5.0 * ctx.eps()) {
        best.near_degenerate = true;
      }
      if (alt.c_eps < best.c_eps) {
        alt.near_degenerate = best.near_degenerate;
        best = std::move(alt);
      }
      if (best.c_eps <= (1.0 + cfg.level_guard_margin) * bound) break;
    }
  }
  return best;
}

}  // namespace magnls
