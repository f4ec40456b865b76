#include "magnls/limit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace magnls {

namespace {

double odd_power(double w, double p) {
  // |w|^{p-2} w, sign-preserving for overshoot trajectories.
  return std::copysign(std::pow(std::abs(w), p - 1.0), w);
}

struct OdeState {
  double w;
  double v;  // w'
};

// Right-hand side of w'' + w'/r - a0 w + |w|^{p-2}w = 0 away from r = 0.
OdeState rhs(double r, const OdeState& y, double a0, double p) {
  return OdeState{y.v, -y.v / r + a0 * y.w - odd_power(y.w, p)};
}

// One adaptive Dormand-Prince 4(5) step; returns the accepted step size
// through h and the proposal for the next one through h_next.
OdeState dopri_step(double r, const OdeState& y, double& h, double& h_next,
                    double a0, double p, double tol) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const auto fma_state = [](const OdeState& base, double hh,
                            std::initializer_list<std::pair<double, OdeState>>
                                terms) {
    OdeState out = base;
    for (const auto& [coef, k] : terms) {
      out.w += hh * coef * k.w;
      out.v += hh * coef * k.v;
    }
    return out;
  };

  for (int attempt = 0; attempt < 60; ++attempt) {
    const OdeState k1 = rhs(r, y, a0, p);
    const OdeState k2 =
        rhs(r + h / 5, fma_state(y, h, {{a21, k1}}), a0, p);
    const OdeState k3 =
        rhs(r + 3 * h / 10, fma_state(y, h, {{a31, k1}, {a32, k2}}), a0, p);
    const OdeState k4 = rhs(
        r + 4 * h / 5, fma_state(y, h, {{a41, k1}, {a42, k2}, {a43, k3}}), a0,
        p);
    const OdeState k5 = rhs(
        r + 8 * h / 9,
        fma_state(y, h, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}), a0, p);
    const OdeState k6 = rhs(
        r + h,
        fma_state(y, h, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}}),
        a0, p);
    const OdeState y5 = fma_state(
        y, h, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
    const OdeState k7 = rhs(r + h, y5, a0, p);

    const double err_w =
        h * (e1 * k1.w + e3 * k3.w + e4 * k4.w + e5 * k5.w + e6 * k6.w +
             e7 * k7.w);
    const double err_v =
        h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v +
             e7 * k7.v);
    const double scale =
        tol * (1.0 + std::max(std::abs(y.w), std::abs(y.v)));
    const double err = std::max(std::abs(err_w), std::abs(err_v)) / scale;

    if (err <= 1.0 || h < 1e-14) {
      h_next = h * std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2,
                              5.0);
      return y5;
    }
    h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
  }
  throw std::runtime_error("limit shooting: step size underflow");
}

enum class ShotOutcome { kOvershoot, kUndershoot };

// First step leaves r = 0 by the series
// w(r) = w0 + r^2 (a0 w0 - w0^{p-1})/4, removing the w'/r singularity.
OdeState series_start(double height, double r1, double a0, double p) {
  const double curv = a0 * height - odd_power(height, p);
  return OdeState{height + 0.25 * r1 * r1 * curv, 0.5 * r1 * curv};
}

ShotOutcome classify_shot(double height, double a0, double p, double r_end,
                          double tol) {
  const double r1 = 1e-6 / std::sqrt(a0);
  OdeState y = series_start(height, r1, a0, p);
  double r = r1;
  double h = 1e-3 / std::sqrt(a0);
  while (r < r_end) {
    double h_next = h;
    h = std::min(h, r_end - r);
    const OdeState y_new = dopri_step(r, y, h, h_next, a0, p, tol);
    r += h;
    h = h_next;
    y = y_new;
    if (y.w <= 0.0) return ShotOutcome::kOvershoot;
    if (y.v >= 0.0) return ShotOutcome::kUndershoot;
  }
  return ShotOutcome::kUndershoot;
}

double simpson_weighted(const std::vector<double>& r,
                        const std::vector<double>& f) {
  // Simpson on a uniform grid with an odd number of samples.
  const std::size_t n = r.size();
  const double h = r[1] - r[0];
  double sum = f[0] * r[0] + f[n - 1] * r[n - 1];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    sum += f[k] * r[k] * (k % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

}  // namespace

double GroundState1D::eval(double radius) const {
  if (radius <= 0.0) return w.front();
  if (radius >= r_max) {
    return w.back() * std::exp(-std::sqrt(a0) * (radius - r_max));
  }
  const double h = r[1] - r[0];
  const std::size_t k =
      std::min(std::size_t(radius / h), r.size() - 2);
  const double t = (radius - r[k]) / h;
  return (1.0 - t) * w[k] + t * w[k + 1];
}

GroundState1D solve_limit_ground_state(double a0, double p,
                                       const ShootingOptions& opts) {
  if (a0 <= 0.0) throw std::domain_error("solve_limit_ground_state: a0 <= 0");
  if (p <= 2.0) throw std::domain_error("solve_limit_ground_state: p <= 2");

  const double sqrt_a0 = std::sqrt(a0);
  const double r_max = opts.r_max_factor / sqrt_a0;
  const double r_end = r_max + 20.0 / sqrt_a0;
  const double ode_tol = 1e-12;

  // Bracket the shooting height. The stationary height a0^{1/(p-2)} always
  // undershoots; doubling up from the zero-energy height finds an
  // overshoot.
  double lo = std::pow(a0, 1.0 / (p - 2.0));
  if (classify_shot(lo, a0, p, r_end, ode_tol) == ShotOutcome::kOvershoot) {
    throw std::runtime_error(
        "solve_limit_ground_state: stationary height overshoots");
  }
  double hi = std::pow(0.5 * p * a0, 1.0 / (p - 2.0));
  while (classify_shot(hi, a0, p, r_end, ode_tol) == ShotOutcome::kUndershoot) {
    hi *= 2.0;
    if (hi > opts.height_max * std::pow(a0, 1.0 / (p - 2.0))) {
      throw std::runtime_error(
          "solve_limit_ground_state: no overshoot bracket below height_max");
    }
  }

  while ((hi - lo) > opts.tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (classify_shot(mid, a0, p, r_end, ode_tol) == ShotOutcome::kOvershoot) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo < 1e-16 * hi) break;
  }
  const double height = 0.5 * (lo + hi);

  // Final pass lands exactly on the uniform output nodes.
  GroundState1D gs;
  gs.a0 = a0;
  gs.p = p;
  gs.r_max = r_max;
  const int n = opts.samples % 2 == 1 ? opts.samples : opts.samples + 1;
  gs.r.resize(n);
  gs.w.resize(n);
  gs.dw.resize(n);
  const double dr = r_max / (n - 1);
  for (int k = 0; k < n; ++k) gs.r[k] = k * dr;

  const double r1 = 1e-6 / sqrt_a0;
  OdeState y = series_start(height, r1, a0, p);
  double r = r1;
  double h = 1e-3 / sqrt_a0;
  gs.w[0] = height;
  gs.dw[0] = 0.0;
  int spliced_from = -1;
  for (int k = 1; k < n; ++k) {
    const double target = gs.r[k];
    while (r < target - 1e-15 * r_max) {
      double h_next = h;
      double h_try = std::min(h, target - r);
      y = dopri_step(r, y, h_try, h_next, a0, p, ode_tol);
      r += h_try;
      if (h_try >= h) h = h_next;
    }
    gs.w[k] = y.w;
    gs.dw[k] = y.v;
    // Beyond machine-level shooting accuracy the tail eventually strays;
    // splice the exponential envelope from the first misbehaving node.
    if (y.w <= 1e-9 * height || y.v >= 0.0 || y.w <= 0.0) {
      spliced_from = k;
      break;
    }
  }
  if (spliced_from > 0) {
    const int k0 = spliced_from;
    double base = std::max(gs.w[k0], 0.0);
    if (base <= 0.0 || gs.dw[k0] >= 0.0) {
      base = gs.w[k0 - 1] * std::exp(-sqrt_a0 * dr);
    }
    for (int k = k0; k < n; ++k) {
      gs.w[k] = base * std::exp(-sqrt_a0 * (gs.r[k] - gs.r[k0]));
      gs.dw[k] = -sqrt_a0 * gs.w[k];
    }
  }

  std::vector<double> dens(n), mass_dens(n);
  for (int k = 0; k < n; ++k) {
    dens[k] = gs.dw[k] * gs.dw[k] + a0 * gs.w[k] * gs.w[k];
    mass_dens[k] = gs.w[k] * gs.w[k];
  }
  const double quad = 2.0 * M_PI * simpson_weighted(gs.r, dens);
  gs.energy = (0.5 - 1.0 / p) * quad;
  gs.mass = 2.0 * M_PI * simpson_weighted(gs.r, mass_dens);

  // Residual sanity: the Nehari identity must hold to quadrature accuracy.
  std::vector<double> pw(n);
  for (int k = 0; k < n; ++k) pw[k] = std::pow(std::abs(gs.w[k]), p);
  const double lhs = quad;
  const double rhs_nehari = 2.0 * M_PI * simpson_weighted(gs.r, pw);
  if (std::abs(lhs - rhs_nehari) > 1e-4 * rhs_nehari) {
    throw std::runtime_error(
        "solve_limit_ground_state: Nehari identity violated; achieved " +
        std::to_string(std::abs(lhs - rhs_nehari) / rhs_nehari));
  }
  return gs;
}

double ground_energy(const GroundState1D& gs) {
  std::vector<double> dens(gs.r.size());
  for (std::size_t k = 0; k < gs.r.size(); ++k) {
    dens[k] = gs.dw[k] * gs.dw[k] + gs.a0 * gs.w[k] * gs.w[k];
  }
  return (0.5 - 1.0 / gs.p) * 2.0 * M_PI * simpson_weighted(gs.r, dens);
}

double ground_energy_unit(double p) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  const double value = solve_limit_ground_state(1.0, p).energy;
  cache[p] = value;
  return value;
}

double ConcentrationFunctionHandle::value(double rho, double x3) const {
  if (rho <= 0.0) {
    throw std::domain_error("concentration function: rho must be positive");
  }
  const double c = magnetic.c(rho, x3);
  const double a = c * c + scalar.eval(rho, x3);
  if (a <= 0.0) {
    throw std::domain_error(
        "concentration function: c^2 + V must be positive");
  }
  const double core = rho * std::pow(a, 2.0 / (p - 2.0));
  return normalization == MNormalization::kWith2Pi ? 2.0 * M_PI * e01 * core
                                                   : core;
}

ConcentrationFunctionHandle make_concentration_handle(
    const CylMagneticPotential& magnetic, const ScalarPotential& scalar,
    double p, MNormalization normalization) {
  ConcentrationFunctionHandle h;
  h.magnetic = magnetic;
  h.scalar = scalar;
  h.p = p;
  h.normalization = normalization;
  h.e01 = ground_energy_unit(p);
  return h;
}

ConcentrationMinimum minimize_concentration(
    const ConcentrationFunctionHandle& handle, const ConcentrationDomain& dom,
    double tol, int scan_points) {
  if (!dom.valid()) throw std::domain_error("minimize_concentration: bad domain");
  const auto f = [&](double rho) { return handle.value(rho, 0.0); };

  int best_i = 0;
  double best = f(dom.rho_lo);
  for (int i = 1; i < scan_points; ++i) {
    const double rho =
        dom.rho_lo + (dom.rho_hi - dom.rho_lo) * i / (scan_points - 1);
    const double v = f(rho);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  const double h = (dom.rho_hi - dom.rho_lo) / (scan_points - 1);
  double a = std::max(dom.rho_lo, dom.rho_lo + (best_i - 1) * h);
  double b = std::min(dom.rho_hi, dom.rho_lo + (best_i + 1) * h);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  ConcentrationMinimum out;
  out.rho_star = 0.5 * (a + b);
  out.x3_star = 0.0;
  out.m_min_segment = std::min({best, f1, f2});

  // Rectangle infimum for the admissibility checks; the landscapes in
  // scope are x3-even, so the segment usually wins.
  double inf2d = out.m_min_segment;
  const int nr = 512, nz = 129;
  for (int i = 0; i < nr; ++i) {
    const double rho = dom.rho_lo + (dom.rho_hi - dom.rho_lo) * i / (nr - 1);
    for (int j = 0; j < nz; ++j) {
      const double z =
          -dom.x3_half_width + 2.0 * dom.x3_half_width * j / (nz - 1);
      inf2d = std::min(inf2d, handle.value(rho, z));
    }
  }
  out.m_inf_domain = inf2d;
  return out;
}

PlanarField gauge_transform(const PlanarField& u, const PlanarGrid& grid,
                            const std::array<double, 2>& a0,
                            GaugeDirection direction) {
  const double sign = direction == GaugeDirection::kAdd ? 1.0 : -1.0;
  PlanarField out(u.size());
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      const double phase = sign * (a0[0] * grid.x(i) + a0[1] * grid.y(j));
      out[grid.idx(i, j)] =
          u[grid.idx(i, j)] * std::polar(1.0, phase);
    }
  }
  return out;
}

namespace {

// Staggered kinetic + nodal potential quadratic form of the limit action;
// fills grad (scaled by the flat measure) when requested.
double planar_quadratic(const PlanarField& u, const PlanarGrid& grid,
                        const std::array<double, 2>& a0_vec, double a0,
                        PlanarField* grad) {
  const double hx = grid.hx(), hy = grid.hy();
  const double cell = hx * hy;
  const std::complex<double> I(0.0, 1.0);
  double quad = 0.0;
  if (grad) grad->assign(u.size(), {0.0, 0.0});
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      const std::size_t id = grid.idx(i, j);
      if (i + 1 < grid.nx) {
        const std::complex<double> d =
            I * (u[grid.idx(i + 1, j)] - u[id]) / hx +
            0.5 * a0_vec[0] * (u[grid.idx(i + 1, j)] + u[id]);
        quad += cell * std::norm(d);
        if (grad) {
          const std::complex<double> alpha = I / hx + 0.5 * a0_vec[0];
          const std::complex<double> beta = -I / hx + 0.5 * a0_vec[0];
          (*grad)[grid.idx(i + 1, j)] += cell * std::conj(alpha) * d;
          (*grad)[id] += cell * std::conj(beta) * d;
        }
      }
      if (j + 1 < grid.ny) {
        const std::complex<double> d =
            I * (u[grid.idx(i, j + 1)] - u[id]) / hy +
            0.5 * a0_vec[1] * (u[grid.idx(i, j + 1)] + u[id]);
        quad += cell * std::norm(d);
        if (grad) {
          const std::complex<double> alpha = I / hy + 0.5 * a0_vec[1];
          const std::complex<double> beta = -I / hy + 0.5 * a0_vec[1];
          (*grad)[grid.idx(i, j + 1)] += cell * std::conj(alpha) * d;
          (*grad)[id] += cell * std::conj(beta) * d;
        }
      }
      quad += cell * a0 * std::norm(u[id]);
      if (grad) (*grad)[id] += cell * a0 * u[id];
    }
  }
  return quad;
}

}  // namespace

double limit_functional(const PlanarField& u, const PlanarGrid& grid,
                        const std::array<double, 2>& a0_vec, double a0,
                        double p) {
  const double quad = planar_quadratic(u, grid, a0_vec, a0, nullptr);
  double pp = 0.0;
  for (const auto& z : u) pp += std::pow(std::norm(z), 0.5 * p);
  pp *= grid.hx() * grid.hy();
  return 0.5 * quad - pp / p;
}

PlanarField minimize_limit_functional(const PlanarGrid& grid,
                                      const std::array<double, 2>& a0_vec,
                                      double a0, double p, int max_iters,
                                      double grad_tol) {
  const double cell = grid.hx() * grid.hy();
  PlanarField u(grid.size(), {0.0, 0.0});
  // Gaussian seed of the right height; the phase e^{i A0 . y} puts it in
  // the gauge class of the A0 ground state.
  const double cx = 0.5 * (grid.x_min + grid.x_max);
  const double cy = 0.5 * (grid.y_min + grid.y_max);
  const double height = std::pow(a0, 1.0 / (p - 2.0)) * 2.2;
  for (int i = 1; i + 1 < grid.nx; ++i) {
    for (int j = 1; j + 1 < grid.ny; ++j) {
      const double dx = grid.x(i) - cx, dy = grid.y(j) - cy;
      const double phase = a0_vec[0] * grid.x(i) + a0_vec[1] * grid.y(j);
      u[grid.idx(i, j)] = height * std::exp(-0.5 * a0 * (dx * dx + dy * dy)) *
                          std::polar(1.0, phase);
    }
  }

  const auto project = [&](PlanarField& f) {
    double quad = planar_quadratic(f, grid, a0_vec, a0, nullptr);
    double pp = 0.0;
    for (const auto& z : f) pp += std::pow(std::norm(z), 0.5 * p);
    pp *= cell;
    if (pp <= 0.0) return;
    const double t = std::pow(quad / pp, 1.0 / (p - 2.0));
    for (auto& z : f) z *= t;
  };
  const auto action = [&](const PlanarField& f) {
    double pp = 0.0;
    for (const auto& z : f) pp += std::pow(std::norm(z), 0.5 * p);
    return 0.5 * planar_quadratic(f, grid, a0_vec, a0, nullptr) -
           cell * pp / p;
  };
  project(u);

  PlanarField grad, prev_u, prev_grad, trial;
  const double a0_abs = std::hypot(a0_vec[0], a0_vec[1]);
  const double tau0 =
      1.0 / (4.0 / (grid.hx() * grid.hx()) + 4.0 / (grid.hy() * grid.hy()) +
             a0 + a0_abs * a0_abs + 8.0);
  double tau = tau0;
  double J_ref = action(u);
  for (int iter = 0; iter < max_iters; ++iter) {
    const double quad = planar_quadratic(u, grid, a0_vec, a0, &grad);
    double gnorm2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      grad[k] /= cell;
      grad[k] -= std::pow(std::norm(u[k]), 0.5 * (p - 2.0)) * u[k];
      gnorm2 += std::norm(grad[k]);
    }
    // Zero the gradient on the Dirichlet boundary.
    for (int i = 0; i < grid.nx; ++i) {
      grad[grid.idx(i, 0)] = grad[grid.idx(i, grid.ny - 1)] = 0.0;
    }
    for (int j = 0; j < grid.ny; ++j) {
      grad[grid.idx(0, j)] = grad[grid.idx(grid.nx - 1, j)] = 0.0;
    }
    if (std::sqrt(gnorm2) <= grad_tol * std::sqrt(std::max(quad, 1e-30))) break;

    if (iter > 0) {
      // Barzilai-Borwein trial step around the spectral estimate.
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        const auto du = u[k] - prev_u[k];
        const auto dg = grad[k] - prev_grad[k];
        num += std::norm(du);
        den += (du * std::conj(dg)).real();
      }
      if (den > 0.0) tau = std::clamp(num / den, 0.1 * tau0, 2e4 * tau0);
    }
    prev_u = u;
    prev_grad = grad;

    double tau_try = tau;
    for (int bt = 0; bt < 30; ++bt) {
      trial = u;
      for (std::size_t k = 0; k < u.size(); ++k) {
        trial[k] -= tau_try * grad[k];
      }
      project(trial);
      const double J_t = action(trial);
      if (J_t <= J_ref + 1e-12 * std::abs(J_ref)) {
        u.swap(trial);
        J_ref = J_t;
        break;
      }
      tau_try *= 0.25;
    }
  }
  return u;
}

}  // namespace magnls
