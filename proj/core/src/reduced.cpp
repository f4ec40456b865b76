#include "magnls/reduced.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace magnls {

namespace {

// s^e with the exponents that occur in hot loops special-cased.
inline double pow_fast(double s, double e) {
  if (e == 1.0) return s;
  if (e == 0.5) return std::sqrt(s);
  if (e == 2.0) return s * s;
  return std::pow(s, e);
}

}  // namespace

ReducedContext::ReducedContext(double eps, const HalfPlaneGrid& grid,
                               CylMagneticPotential magnetic,
                               ScalarPotential scalar, PenalizationParams pen,
                               ConcentrationDomain dom, double p)
    : eps_(eps),
      grid_(grid),
      magnetic_(std::move(magnetic)),
      scalar_(std::move(scalar)),
      pen_(pen),
      dom_(dom),
      p_(p) {
  if (eps_ <= 0.0) throw std::domain_error("ReducedContext: eps must be > 0");
  if (p_ <= 2.0) throw std::domain_error("ReducedContext: p must be > 2");
  if (!grid_.valid()) throw std::domain_error("ReducedContext: invalid grid");
  if (!pen_.valid()) {
    throw std::domain_error("ReducedContext: penalization params out of range");
  }
  if (!dom_.valid()) throw std::domain_error("ReducedContext: invalid domain");

  // A domain covering the whole grid disables the penalization (pure power
  // everywhere); otherwise the closure must sit inside the grid with a 10%
  // margin so the Dirichlet box stays honest.
  penalization_disabled_ =
      dom_.rho_lo <= grid_.rho_min && dom_.rho_hi >= grid_.rho_max &&
      dom_.x3_half_width >= std::max(-grid_.x3_min, grid_.x3_max);
  if (!penalization_disabled_) {
    const double margin_rho = 0.1 * (grid_.rho_max - grid_.rho_min) - 1e-12;
    const double margin_x3 = 0.1 * (grid_.x3_max - grid_.x3_min) - 1e-12;
    const bool ok = dom_.rho_lo - grid_.rho_min >= margin_rho &&
                    grid_.rho_max - dom_.rho_hi >= margin_rho &&
                    dom_.x3_half_width + margin_x3 <= grid_.x3_max &&
                    -dom_.x3_half_width - margin_x3 >= grid_.x3_min;
    if (!ok) {
      throw std::domain_error(
          "ReducedContext: domain closure must sit inside the grid with a "
          "10% margin");
    }
  }

  const std::size_t n = grid_.size();
  pot_coef_.resize(n);
  pen_cap_.resize(n);
  crossing_.resize(n);
  in_lambda_.resize(n);
  weight_.resize(n);
  const double eps2 = eps_ * eps_;
  const double e_cross = 2.0 / (p_ - 2.0);
  for (int i = 0; i < grid_.n_rho; ++i) {
    const double rho = grid_.rho(i);
    for (int j = 0; j < grid_.n_x3; ++j) {
      const double z = grid_.x3(j);
      const std::size_t id = grid_.idx(i, j);
      const double c = magnetic_.c(rho, z);
      const double v = scalar_.eval(rho, z);
      pot_coef_[id] = c * c + v;
      const double cap =
          eps2 * aux_hardy_potential(pen_, std::hypot(rho, z)) + pen_.mu * v;
      pen_cap_[id] = cap;
      crossing_[id] = pow_fast(cap, e_cross);
      in_lambda_[id] =
          (penalization_disabled_ || dom_.contains(rho, z)) ? 1 : 0;
      weight_[id] = magnls::node_weight(grid_, i, j);
    }
  }

  // Edge tables for the staggered kinetic form.
  const double hr = grid_.h_rho(), hz = grid_.h_x3();
  phi_edge_.resize(std::size_t(grid_.n_rho - 1) * grid_.n_x3);
  wr_edge_.resize(phi_edge_.size());
  for (int i = 0; i + 1 < grid_.n_rho; ++i) {
    const double rho_mid = grid_.rho(i) + 0.5 * hr;
    for (int j = 0; j < grid_.n_x3; ++j) {
      const double tj = (j == 0 || j == grid_.n_x3 - 1) ? 0.5 : 1.0;
      const std::size_t e = std::size_t(i) * grid_.n_x3 + j;
      phi_edge_[e] = magnetic_.phi(rho_mid, grid_.x3(j));
      wr_edge_[e] = 2.0 * M_PI * rho_mid * hr * hz * tj;
    }
  }
  a3_edge_.resize(std::size_t(grid_.n_rho) * (grid_.n_x3 - 1));
  wz_edge_.resize(a3_edge_.size());
  for (int i = 0; i < grid_.n_rho; ++i) {
    const double ti = (i == 0 || i == grid_.n_rho - 1) ? 0.5 : 1.0;
    const double rho = grid_.rho(i);
    for (int j = 0; j + 1 < grid_.n_x3; ++j) {
      const double z_mid = grid_.x3(j) + 0.5 * hz;
      const std::size_t e = std::size_t(i) * (grid_.n_x3 - 1) + j;
      a3_edge_[e] = magnetic_.a3(rho, z_mid);
      wz_edge_[e] = 2.0 * M_PI * rho * ti * hr * hz;
    }
  }
}

double ReducedContext::nonlinearity(double rho, double x3, double s) const {
  if (s < 0.0) throw std::domain_error("nonlinearity: s must be >= 0");
  const double f = pow_fast(s, 0.5 * (p_ - 2.0));
  if (penalization_disabled_ || dom_.contains(rho, x3)) return f;
  const double eps2 = eps_ * eps_;
  const double cap = eps2 * aux_hardy_potential(pen_, std::hypot(rho, x3)) +
                     pen_.mu * scalar_.eval(rho, x3);
  return std::min(cap, f);
}

double ReducedContext::primitive(double rho, double x3, double s) const {
  if (s < 0.0) throw std::domain_error("primitive: s must be >= 0");
  const double inside = pow_fast(s, 0.5 * p_) / p_;
  if (penalization_disabled_ || dom_.contains(rho, x3)) return inside;
  const double eps2 = eps_ * eps_;
  const double cap = eps2 * aux_hardy_potential(pen_, std::hypot(rho, x3)) +
                     pen_.mu * scalar_.eval(rho, x3);
  const double s_star = pow_fast(cap, 2.0 / (p_ - 2.0));
  if (s <= s_star) return inside;
  return pow_fast(s_star, 0.5 * p_) / p_ + 0.5 * cap * (s - s_star);
}

double ReducedContext::nonlinearity_at(std::size_t id, double s) const {
  const double f = pow_fast(s, 0.5 * (p_ - 2.0));
  if (in_lambda_[id]) return f;
  return std::min(pen_cap_[id], f);
}

double ReducedContext::primitive_at(std::size_t id, double s) const {
  if (in_lambda_[id] || s <= crossing_[id]) return pow_fast(s, 0.5 * p_) / p_;
  const double s_star = crossing_[id];
  return pow_fast(s_star, 0.5 * p_) / p_ + 0.5 * pen_cap_[id] * (s - s_star);
}

std::pair<ComplexField, ComplexField> magnetic_gradient(
    const ReducedContext& ctx, const ComplexField& u) {
  const HalfPlaneGrid& g = ctx.grid();
  const double hr = g.h_rho(), hz = g.h_x3();
  const Complex ie(0.0, ctx.eps());
  ComplexField dr(g), dz(g);
  for (int i = 0; i < g.n_rho; ++i) {
    const double rho = g.rho(i);
    for (int j = 0; j < g.n_x3; ++j) {
      const double z = g.x3(j);
      Complex du_r, du_z;
      if (i == 0) {
        du_r = (u.at(1, j) - u.at(0, j)) / hr;
      } else if (i == g.n_rho - 1) {
        du_r = (u.at(i, j) - u.at(i - 1, j)) / hr;
      } else {
        du_r = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * hr);
      }
      if (j == 0) {
        du_z = (u.at(i, 1) - u.at(i, 0)) / hz;
      } else if (j == g.n_x3 - 1) {
        du_z = (u.at(i, j) - u.at(i, j - 1)) / hz;
      } else {
        du_z = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * hz);
      }
      dr.at(i, j) = ie * du_r + ctx.magnetic().phi(rho, z) * u.at(i, j);
      dz.at(i, j) = ie * du_z + ctx.magnetic().a3(rho, z) * u.at(i, j);
    }
  }
  return {std::move(dr), std::move(dz)};
}

EnergySplit energy_norm_split(const ReducedContext& ctx,
                              const ComplexField& u) {
  const HalfPlaneGrid& g = ctx.grid();
  const double hr = g.h_rho(), hz = g.h_x3();
  const double eps = ctx.eps();
  const Complex* uv = u.values.data();
  EnergySplit split;

  const auto& phi_e = ctx.phi_rho_edges();
  const auto& wr_e = ctx.rho_edge_weights();
  for (int i = 0; i + 1 < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const std::size_t id = g.idx(i, j);
      const std::size_t e = std::size_t(i) * g.n_x3 + j;
      const Complex diff = uv[id + g.n_x3] - uv[id];
      const Complex avg = 0.5 * (uv[id + g.n_x3] + uv[id]);
      const Complex d =
          Complex(0.0, eps / hr) * diff + phi_e[e] * avg;
      split.kinetic += wr_e[e] * std::norm(d);
    }
  }
  const auto& a3_e = ctx.a3_x3_edges();
  const auto& wz_e = ctx.x3_edge_weights();
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j + 1 < g.n_x3; ++j) {
      const std::size_t id = g.idx(i, j);
      const std::size_t e = std::size_t(i) * (g.n_x3 - 1) + j;
      const Complex diff = uv[id + 1] - uv[id];
      const Complex avg = 0.5 * (uv[id + 1] + uv[id]);
      const Complex d = Complex(0.0, eps / hz) * diff + a3_e[e] * avg;
      split.kinetic += wz_e[e] * std::norm(d);
    }
  }
  const auto& pot = ctx.potential_table();
  const auto& w = ctx.weights();
  for (std::size_t id = 0; id < g.size(); ++id) {
    split.potential += w[id] * pot[id] * std::norm(uv[id]);
  }
  return split;
}

double energy_norm(const ReducedContext& ctx, const ComplexField& u) {
  return energy_norm_split(ctx, u).total();
}

double penalized_energy(const ReducedContext& ctx, const ComplexField& u) {
  const double quad = energy_norm(ctx, u);
  const auto& w = ctx.weights();
  double pen = 0.0;
  for (std::size_t id = 0; id < u.values.size(); ++id) {
    pen += w[id] * ctx.primitive_at(id, std::norm(u.values[id]));
  }
  return 0.5 * quad - pen;
}

namespace {

// Accumulates the Wirtinger derivative of the quadratic part times the
// nodal weight; shared by the full and the quadratic-only gradients.
void accumulate_quadratic(const ReducedContext& ctx, const ComplexField& u,
                          std::vector<Complex>& acc) {
  const HalfPlaneGrid& g = ctx.grid();
  const double hr = g.h_rho(), hz = g.h_x3();
  const double eps = ctx.eps();
  const Complex* uv = u.values.data();
  acc.assign(g.size(), Complex{0.0, 0.0});

  const auto& phi_e = ctx.phi_rho_edges();
  const auto& wr_e = ctx.rho_edge_weights();
  for (int i = 0; i + 1 < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const std::size_t id = g.idx(i, j);
      const std::size_t e = std::size_t(i) * g.n_x3 + j;
      const Complex alpha(0.5 * phi_e[e], eps / hr);
      const Complex beta(0.5 * phi_e[e], -eps / hr);
      const Complex d = alpha * uv[id + g.n_x3] + beta * uv[id];
      acc[id + g.n_x3] += wr_e[e] * std::conj(alpha) * d;
      acc[id] += wr_e[e] * std::conj(beta) * d;
    }
  }
  const auto& a3_e = ctx.a3_x3_edges();
  const auto& wz_e = ctx.x3_edge_weights();
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j + 1 < g.n_x3; ++j) {
      const std::size_t id = g.idx(i, j);
      const std::size_t e = std::size_t(i) * (g.n_x3 - 1) + j;
      const Complex alpha(0.5 * a3_e[e], eps / hz);
      const Complex beta(0.5 * a3_e[e], -eps / hz);
      const Complex d = alpha * uv[id + 1] + beta * uv[id];
      acc[id + 1] += wz_e[e] * std::conj(alpha) * d;
      acc[id] += wz_e[e] * std::conj(beta) * d;
    }
  }
  const auto& pot = ctx.potential_table();
  const auto& w = ctx.weights();
  for (std::size_t id = 0; id < g.size(); ++id) {
    acc[id] += w[id] * pot[id] * uv[id];
  }
}

void finish_gradient(const ReducedContext& ctx, std::vector<Complex>& acc,
                     ComplexField& out) {
  const auto& w = ctx.weights();
  for (std::size_t id = 0; id < acc.size(); ++id) {
    out.values[id] = acc[id] / w[id];
  }
  out.zero_boundary();
}

}  // namespace

ComplexField penalized_gradient(const ReducedContext& ctx,
                                const ComplexField& u) {
  std::vector<Complex> acc;
  accumulate_quadratic(ctx, u, acc);
  const auto& w = ctx.weights();
  for (std::size_t id = 0; id < acc.size(); ++id) {
    const double s = std::norm(u.values[id]);
    acc[id] -= w[id] * ctx.nonlinearity_at(id, s) * u.values[id];
  }
  ComplexField out(ctx.grid());
  finish_gradient(ctx, acc, out);
  return out;
}

ComplexField quadratic_gradient(const ReducedContext& ctx,
                                const ComplexField& u) {
  std::vector<Complex> acc;
  accumulate_quadratic(ctx, u, acc);
  ComplexField out(ctx.grid());
  finish_gradient(ctx, acc, out);
  return out;
}

double quadratic_form_lambda_max(const ReducedContext& ctx, int iters,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexField v(ctx.grid());
  for (int i = 1; i + 1 < ctx.grid().n_rho; ++i) {
    for (int j = 1; j + 1 < ctx.grid().n_x3; ++j) {
      v.at(i, j) = Complex(dist(rng), dist(rng));
    }
  }
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    ComplexField qv = quadratic_gradient(ctx, v);
    const double vv = weighted_inner(ctx.grid(), v.values, v.values);
    lambda = weighted_inner(ctx.grid(), qv.values, v.values) / vv;
    const double norm = weighted_norm(ctx.grid(), qv.values);
    if (norm <= 0.0) break;
    for (auto& z : qv.values) z /= norm;
    v = std::move(qv);
  }
  return lambda;
}

}  // namespace magnls
