#include "magnls/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "magnls/solver.hpp"

namespace magnls {

namespace {

std::string format_max(const char* label, double value) {
  std::ostringstream out;
  out << label << " " << value;
  return out.str();
}

ComplexField random_field(const HalfPlaneGrid& grid, std::mt19937_64& rng,
                          double amplitude = 1.0) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  ComplexField u(grid);
  for (int i = 1; i + 1 < grid.n_rho; ++i) {
    for (int j = 1; j + 1 < grid.n_x3; ++j) {
      u.at(i, j) = Complex(dist(rng), dist(rng));
    }
  }
  return u;
}

ComplexField gaussian_bump(const HalfPlaneGrid& grid, double rho0, double x30,
                           double width, double phase_r = 0.0,
                           double phase_z = 0.0) {
  ComplexField u(grid);
  for (int i = 1; i + 1 < grid.n_rho; ++i) {
    for (int j = 1; j + 1 < grid.n_x3; ++j) {
      const double dr = grid.rho(i) - rho0;
      const double dz = grid.x3(j) - x30;
      const double amp = std::exp(-(dr * dr + dz * dz) / (width * width));
      u.at(i, j) =
          amp * std::polar(1.0, phase_r * grid.rho(i) + phase_z * grid.x3(j));
    }
  }
  return u;
}

// Staggered kinetic energy of the modulus field, eps^2 Int |grad|u||^2 with
// the cylindrical weight; pairs with the kinetic part of energy_norm.
double modulus_gradient_energy(const ReducedContext& ctx,
                               const ComplexField& u) {
  const HalfPlaneGrid& g = ctx.grid();
  const double hr = g.h_rho(), hz = g.h_x3();
  const double e2 = ctx.eps() * ctx.eps();
  const auto& wr = ctx.rho_edge_weights();
  const auto& wz = ctx.x3_edge_weights();
  double sum = 0.0;
  for (int i = 0; i + 1 < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const double d = (std::abs(u.at(i + 1, j)) - std::abs(u.at(i, j))) / hr;
      sum += wr[std::size_t(i) * g.n_x3 + j] * d * d;
    }
  }
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j + 1 < g.n_x3; ++j) {
      const double d = (std::abs(u.at(i, j + 1)) - std::abs(u.at(i, j))) / hz;
      sum += wz[std::size_t(i) * (g.n_x3 - 1) + j] * d * d;
    }
  }
  return e2 * sum;
}

ConcentrationDomain covering_domain(const HalfPlaneGrid& g) {
  ConcentrationDomain dom;
  dom.rho_lo = 0.5 * g.rho_min;
  dom.rho_hi = 2.0 * g.rho_max;
  dom.x3_half_width = 2.0 * std::max(std::abs(g.x3_min), std::abs(g.x3_max));
  return dom;
}

}  // namespace

VerifyReport run_verify_suites(const RunConfig& cfg) {
  VerifyReport report;
  std::mt19937_64 rng(cfg.seed);
  const double eps = cfg.eps_list.empty() ? 0.1 : cfg.eps_list.back();
  const ReducedContext ctx(eps, cfg.grid, cfg.magnetic, cfg.scalar,
                           cfg.penalization, cfg.domain, cfg.p);

  // Scalar potential: nonnegative, even in x3.
  {
    std::uniform_real_distribution<double> rho_d(cfg.grid.rho_min,
                                                 cfg.grid.rho_max);
    std::uniform_real_distribution<double> z_d(0.0, cfg.grid.x3_max);
    double worst = 0.0;
    bool nonneg = true;
    for (int s = 0; s < 500; ++s) {
      const double rho = rho_d(rng), z = z_d(rng);
      const double vp = cfg.scalar.eval(rho, z);
      const double vm = cfg.scalar.eval(rho, -z);
      nonneg = nonneg && vp >= 0.0;
      worst = std::max(worst, std::abs(vp - vm));
      worst = std::max(worst,
                       std::abs(cfg.magnetic.c(rho, z) - cfg.magnetic.c(rho, -z)));
      worst = std::max(worst, std::abs(cfg.magnetic.phi(rho, z) -
                                       cfg.magnetic.phi(rho, -z)));
    }
    report.suites.push_back({"scalar-potential-symmetry", nonneg && worst == 0.0,
                             format_max("max +-x3 mismatch", worst)});
  }

  // Magnetic equivariance under random rotations/reflections.
  {
    const auto rep = check_equivariance(cfg.magnetic, 100, 1e-10, cfg.seed);
    report.suites.push_back({"equivariance", rep.pass,
                             format_max("max violation", rep.max_violation)});
  }

  // Pseudometric axioms on random triples.
  {
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    double worst = 0.0;
    for (int s = 0; s < 300; ++s) {
      const Point3 a{coord(rng), coord(rng), coord(rng)};
      const Point3 b{coord(rng), coord(rng), coord(rng)};
      const Point3 c{coord(rng), coord(rng), coord(rng)};
      worst = std::max(worst,
                       std::abs(cyl_distance(a, b) - cyl_distance(b, a)));
      worst = std::max(worst, cyl_distance(a, c) - cyl_distance(a, b) -
                                  cyl_distance(b, c));
    }
    report.suites.push_back({"pseudometric", worst <= 1e-12,
                             format_max("worst axiom defect", worst)});
  }

  // curl A recovers (0, 0, b) for the constant-field family.
  {
    const double b_ref = cfg.magnetic.family == MagneticFamily::kConstantField
                             ? cfg.magnetic.field_strength
                             : 1.5;
    const auto pot = CylMagneticPotential::constant_field(b_ref);
    const double h = 1e-4;
    double worst = 0.0;
    std::uniform_real_distribution<double> coord(0.4, 2.0);
    for (int s = 0; s < 50; ++s) {
      const Point3 x{coord(rng), coord(rng), coord(rng)};
      const auto A = [&](const Point3& q) { return eval_vector_potential(pot, q); };
      const auto shift = [&](int axis, double d) {
        Point3 q = x;
        q[axis] += d;
        return q;
      };
      const Vec3 dx0 = A(shift(0, h)), dx1 = A(shift(0, -h));
      const Vec3 dy0 = A(shift(1, h)), dy1 = A(shift(1, -h));
      const Vec3 dz0 = A(shift(2, h)), dz1 = A(shift(2, -h));
      const double curl_x = (dy0[2] - dy1[2]) / (2 * h) - (dz0[1] - dz1[1]) / (2 * h);
      const double curl_y = (dz0[0] - dz1[0]) / (2 * h) - (dx0[2] - dx1[2]) / (2 * h);
      const double curl_z = (dx0[1] - dx1[1]) / (2 * h) - (dy0[0] - dy1[0]) / (2 * h);
      worst = std::max({worst, std::abs(curl_x), std::abs(curl_y),
                        std::abs(curl_z - b_ref)});
    }
    report.suites.push_back({"constant-field-curl", worst <= 1e-6,
                             format_max("max curl defect", worst)});
  }

  // Auxiliary potential bounds.
  {
    double worst = 0.0;
    std::uniform_real_distribution<double> log_r(-3.0, 3.0);
    for (int s = 0; s < 500; ++s) {
      const double r = std::exp(log_r(rng));
      const double H = aux_hardy_potential(cfg.penalization, r);
      worst = std::max(worst, H - cfg.penalization.kappa / (r * r));
      if (std::abs(r - 1.0) > 0.5) {
        const double lg = std::abs(std::log(r));
        worst = std::max(
            worst, H - cfg.penalization.kappa /
                           (r * r * std::pow(lg, 1.0 + cfg.penalization.beta)));
      }
    }
    report.suites.push_back({"hardy-auxiliary-bounds", worst <= 1e-14,
                             format_max("max bound excess", worst)});
  }

  // Admissibility of the configured domain.
  {
    const auto handle = make_concentration_handle(cfg.magnetic, cfg.scalar,
                                                  cfg.p);
    const auto rep = check_lambda_conditions(
        cfg.domain, [&](double r, double z) { return handle.value(r, z); },
        cfg.scalar, 1024);
    std::ostringstream detail;
    detail << "inf_seg " << rep.inf_segment << ", boundary "
           << rep.inf_segment_boundary << ", 2*inf_domain "
           << 2.0 * rep.inf_domain << ", inf_V " << rep.inf_potential;
    report.suites.push_back({"domain-admissibility", rep.all_pass(),
                             detail.str()});
  }

  // Penalized nonlinearity: growth and monotonicity properties on a
  // node x log-s grid.
  {
    double worst = 0.0;
    bool monotone = true;
    std::uniform_int_distribution<int> node(0, int(ctx.grid().size()) - 1);
    for (int s = 0; s < 200; ++s) {
      const std::size_t id = std::size_t(node(rng));
      double g_prev = -1.0;
      for (int ls = -12; ls <= 6; ++ls) {
        const double sv = std::pow(10.0, 0.5 * ls);
        const double g = ctx.nonlinearity_at(id, sv);
        const double G = ctx.primitive_at(id, sv);
        if (ctx.node_in_lambda(id)) {
          worst = std::max(worst, cfg.p * G - g * sv);
        } else {
          worst = std::max(worst, 2.0 * G - g * sv);
          worst = std::max(worst, g * sv - ctx.penalty_cap(id) * sv);
        }
        if (g < g_prev - 1e-15) monotone = false;
        g_prev = g;
      }
    }
    report.suites.push_back({"penalized-nonlinearity", worst <= 1e-12 && monotone,
                             format_max("max property defect", worst)});
  }

  // Diamagnetic and magnetic Hardy inequalities on random fields.
  {
    double worst_dia = -1e300, worst_hardy = -1e300;
    for (int s = 0; s < 100; ++s) {
      const ComplexField u = random_field(cfg.grid, rng);
      const EnergySplit split = energy_norm_split(ctx, u);
      const double dia = modulus_gradient_energy(ctx, u);
      const double slack = 10.0 * cfg.grid.h_rho() * split.kinetic + 1e-12;
      worst_dia = std::max(worst_dia, dia - split.kinetic - slack);

      std::vector<double> dens(u.values.size());
      for (int i = 0; i < cfg.grid.n_rho; ++i) {
        for (int j = 0; j < cfg.grid.n_x3; ++j) {
          const double r2 = cfg.grid.rho(i) * cfg.grid.rho(i) +
                            cfg.grid.x3(j) * cfg.grid.x3(j);
          dens[cfg.grid.idx(i, j)] = std::norm(u.at(i, j)) / r2;
        }
      }
      const double hardy = eps * eps * 0.25 * integrate(cfg.grid, dens);
      worst_hardy = std::max(worst_hardy, hardy - split.kinetic - slack);
    }
    const bool pass = worst_dia <= 0.0 && worst_hardy <= 0.0;
    report.suites.push_back({"diamagnetic-hardy", pass,
                             format_max("max excess", std::max(worst_dia,
                                                               worst_hardy))});
  }

  // Ray projection against the pure-power closed form.
  {
    const ReducedContext pure(eps, cfg.grid, cfg.magnetic, cfg.scalar,
                              cfg.penalization, covering_domain(cfg.grid),
                              cfg.p);
    double worst = 0.0;
    const double half_p = 0.5 * cfg.p;
    for (int s = 0; s < 10; ++s) {
      const ComplexField u = random_field(cfg.grid, rng);
      std::vector<double> dens(u.values.size());
      for (std::size_t k = 0; k < u.values.size(); ++k) {
        dens[k] = std::pow(std::norm(u.values[k]), half_p);
      }
      const double t_closed = std::pow(
          energy_norm(pure, u) / integrate(cfg.grid, dens), 1.0 / (cfg.p - 2.0));
      const double t_bisect = nehari_scale(pure, u, 1e-13);
      worst = std::max(worst, std::abs(t_bisect - t_closed) / t_closed);
    }
    report.suites.push_back({"nehari-closed-form", worst <= 1e-10,
                             format_max("max rel mismatch", worst)});
  }

  // Gradient versus central finite differences of the action: strict
  // second order where the action is smooth (pure power), smallness plus
  // decay across the min-branch kinks of the penalized context.
  {
    const ReducedContext pure(eps, cfg.grid, cfg.magnetic, cfg.scalar,
                              cfg.penalization, covering_domain(cfg.grid),
                              cfg.p);
    double worst_ratio = 0.0;
    bool ok = true;
    std::ostringstream fails;
    for (int s = 0; s < 20; ++s) {
      const ComplexField u = random_field(cfg.grid, rng);
      const ComplexField v = random_field(cfg.grid, rng);
      for (const ReducedContext* c : {&pure, &ctx}) {
        const ComplexField grad = penalized_gradient(*c, u);
        const double inner = weighted_inner(cfg.grid, grad.values, v.values);
        const auto fd = [&](double delta) {
          ComplexField up = u, um = u;
          for (std::size_t k = 0; k < u.values.size(); ++k) {
            up.values[k] += delta * v.values[k];
            um.values[k] -= delta * v.values[k];
          }
          return (penalized_energy(*c, up) - penalized_energy(*c, um)) /
                 (2.0 * delta);
        };
        // Uniform second-order envelope |fd(delta) - <grad, v>| <= K
        // delta^2 scale at both steps; robust to accidental cancellation
        // of the cubic term and still six orders away from a wrong
        // gradient.
        const double err2 = std::abs(fd(1e-2) - inner);
        const double err3 = std::abs(fd(1e-3) - inner);
        const double scale = std::abs(inner) + 1.0;
        constexpr double kEnvelope = 2.0;
        const bool this_ok = err2 <= kEnvelope * 1e-4 * scale &&
                             err3 <= kEnvelope * 1e-6 * scale + 1e-9 * scale;
        if (!this_ok) {
          fails << (c == &pure ? " [pure" : " [pen") << " e2 " << err2
                << " e3 " << err3 << " scale " << scale << "]";
        }
        ok = ok && this_ok;
        worst_ratio = std::max(worst_ratio, err2 / scale);
      }
    }
    report.suites.push_back(
        {"gradient-finite-difference", ok,
         format_max("max rel err at delta 1e-2", worst_ratio) + fails.str()});
  }

  // Discrete gauge covariance: linear gauge change moves the energy by
  // O(h^2) only.
  {
    const auto energy_gap = [&](const HalfPlaneGrid& grid) {
      const double alpha = 0.3, beta = -0.2;
      // Zero-field base against (phi, a3) = (-dS/drho, -dS/dx3) for the
      // linear gauge S = alpha rho + beta x3, realized by constant tables.
      auto phi_t = std::make_shared<Table2D>(
          std::vector<double>{grid.rho_min, grid.rho_max},
          std::vector<double>{0.0, std::max(std::abs(grid.x3_min), grid.x3_max)},
          std::vector<double>{-alpha, -alpha, -alpha, -alpha});
      auto a3_t = std::make_shared<Table2D>(
          std::vector<double>{grid.rho_min, grid.rho_max},
          std::vector<double>{grid.x3_min, grid.x3_max},
          std::vector<double>{-beta, -beta, -beta, -beta});
      const auto shifted =
          CylMagneticPotential::tabulated(phi_t, nullptr, a3_t);
      const ReducedContext c1(eps, grid, shifted, cfg.scalar, cfg.penalization,
                              cfg.domain, cfg.p);

      const double rho0 = 0.5 * (cfg.domain.rho_lo + cfg.domain.rho_hi);
      ComplexField u = gaussian_bump(grid, rho0, 0.0, 0.2);
      ComplexField v(grid);
      for (int i = 0; i < grid.n_rho; ++i) {
        for (int j = 0; j < grid.n_x3; ++j) {
          const double S = alpha * grid.rho(i) + beta * grid.x3(j);
          v.at(i, j) = u.at(i, j) * std::polar(1.0, -S / eps);
        }
      }
      const ReducedContext base(eps, grid, CylMagneticPotential::zero_field(),
                                cfg.scalar, cfg.penalization, cfg.domain,
                                cfg.p);
      return std::abs(energy_norm(base, u) - energy_norm(c1, v));
    };
    HalfPlaneGrid fine = cfg.grid;
    fine.n_rho = 2 * cfg.grid.n_rho - 1;
    fine.n_x3 = 2 * cfg.grid.n_x3 - 1;
    const double gap_h = energy_gap(cfg.grid);
    const double gap_h2 = energy_gap(fine);
    const double ratio = gap_h / std::max(gap_h2, 1e-300);
    std::ostringstream detail;
    detail << "gap(h) " << gap_h << ", gap(h/2) " << gap_h2 << ", ratio "
           << ratio;
    report.suites.push_back({"gauge-covariance", ratio >= 2.5 && ratio <= 8.0,
                             detail.str()});
  }

  return report;
}

}  // namespace magnls
