#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magnls/asymptotics.hpp"

using namespace magnls;

namespace {

HalfPlaneGrid grid_n(int n) {
  HalfPlaneGrid g;
  g.rho_min = 0.1;
  g.rho_max = 4.0;
  g.x3_min = -2.0;
  g.x3_max = 2.0;
  g.n_rho = n;
  g.n_x3 = n;
  return g;
}

ReducedContext example_context(double eps, int n) {
  return ReducedContext(eps, grid_n(n),
                        CylMagneticPotential::constant_field(1.0),
                        ScalarPotential::cylindrical_hardy(1.0, 2.0),
                        PenalizationParams{}, ConcentrationDomain{0.5, 2.0, 0.5},
                        4.0);
}

}  // namespace

TEST_CASE("peak of a centered ansatz sits at its center") {
  const ReducedContext ctx = example_context(0.15, 96);
  const ComplexField u = make_init_guess(ctx, 1.0, 0.0);
  const PeakInfo peak = find_peak(u);
  CHECK(std::abs(peak.rho - 1.0) <= ctx.grid().h_rho());
  CHECK(std::abs(peak.x3) <= ctx.grid().h_x3());

  ComplexField zero(ctx.grid());
  CHECK_THROWS_AS(find_peak(zero), std::runtime_error);
}

TEST_CASE("rescaled comparison of the exact ansatz is cutoff-level small") {
  // Center on a node and match the sampling step to the grid so bilinear
  // interpolation is exact; eps small enough that the whole comparison
  // window sits inside the cutoff plateau.
  HalfPlaneGrid g = grid_n(256);
  g.x3_min = -1.95;  // equal spacings so the samples land on nodes
  g.x3_max = 1.95;
  const double h = g.h_rho();
  const double eps = 2.0 * h;  // window radius 8 eps stays in the plateau
  int i0 = int(std::round((1.1 - g.rho_min) / h));
  int j0 = int(std::round((0.0 - g.x3_min) / g.h_x3()));
  const double rho0 = g.rho(i0);
  const double x30 = g.x3(j0);
  const ReducedContext ctx(eps, g, CylMagneticPotential::constant_field(1.0),
                           ScalarPotential::cylindrical_hardy(1.0, 2.0),
                           PenalizationParams{},
                           ConcentrationDomain{0.5, 2.0, 0.5}, 4.0);
  const ComplexField u = make_init_guess(ctx, rho0, x30);
  const double c0 = ctx.magnetic().c(rho0, x30);
  const GroundState1D gs =
      solve_limit_ground_state(c0 * c0 + ctx.scalar().eval(rho0, x30), 4.0);
  const PeakInfo peak{rho0, x30, std::abs(u.at(i0, j0))};
  // Sampling step 0.5 keeps every sample on a grid node at eps = 2h.
  const ProfileComparison cmp =
      rescaled_profile_error(u, peak, eps, gs, 8.0, 0.5);
  CHECK(cmp.max_error < 1e-3);
}

TEST_CASE("window clipped by the grid is reported as truncated") {
  const ReducedContext ctx = example_context(0.3, 64);
  const ComplexField u = make_init_guess(ctx, 0.8, 0.0);
  const GroundState1D gs = solve_limit_ground_state(1.0, 4.0);
  const PeakInfo peak{0.8, 0.0, 1.0};
  // Window of radius 8 at eps 0.3 spans 2.4 length units: exits the grid.
  const ProfileComparison cmp = rescaled_profile_error(u, peak, 0.3, gs);
  CHECK(cmp.truncated);
}

TEST_CASE("penalization violation counter") {
  const ReducedContext ctx = example_context(0.2, 96);
  SUBCASE("zero field has none") {
    ComplexField u(ctx.grid());
    CHECK(count_penalization_violations(ctx, u) == 0);
  }
  SUBCASE("an inflated exterior tail violates") {
    ComplexField u = make_init_guess(ctx, 1.0, 0.0);
    for (int i = 0; i < ctx.grid().n_rho; ++i) {
      for (int j = 0; j < ctx.grid().n_x3; ++j) {
        if (!ctx.domain().contains(ctx.grid().rho(i), ctx.grid().x3(j))) {
          u.at(i, j) += 10.0;
        }
      }
    }
    CHECK(count_penalization_violations(ctx, u) > 0);
  }
}

TEST_CASE("decay envelope recovers a synthetic rate") {
  const HalfPlaneGrid g = grid_n(128);
  const double eps = 0.1, lambda0 = 0.8, C0 = 3.0;
  const PeakInfo peak{1.07, 0.0, 0.0};
  ComplexField u(g);
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const double d = cyl_distance(g.rho(i), g.x3(j), peak.rho, peak.x3);
      const double x_norm = std::hypot(g.rho(i), g.x3(j));
      u.at(i, j) = C0 * std::exp(-(lambda0 / eps) * d / (1.0 + d)) /
                   (1.0 + x_norm);
    }
  }
  // The synthetic center is the reference point of the envelope; the
  // node argmax sits up to h/2 away and would skew the distances.
  const PeakInfo fit_peak{peak.rho, peak.x3, find_peak(u).value};
  const DecayFit fit = fit_decay_envelope(u, fit_peak, eps);
  // The least-squares rate recovers the generating rate on exact data;
  // the certified rate is conservative but positive and never steeper.
  CHECK(fit.lambda_ls == doctest::Approx(lambda0).epsilon(1e-3));
  CHECK(fit.lambda_fit > 0.0);
  CHECK(fit.lambda_fit <= lambda0 * (1.0 + 1e-6));
  CHECK(fit.C <= C0 * 1.01);
  CHECK(fit.C >= 0.8 * C0);

  // The certified bound holds at every fit node by construction.
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const double a = std::abs(u.at(i, j));
      if (a < 1e-12 * find_peak(u).value) continue;
      const double d = cyl_distance(g.rho(i), g.x3(j), peak.rho, peak.x3);
      const double bound = fit.C *
                           std::exp(-(fit.lambda_fit / eps) * d / (1.0 + d)) /
                           (1.0 + std::hypot(g.rho(i), g.x3(j)));
      CHECK(a <= bound * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("barrier inequality at the discrete level") {
  SUBCASE("dominant positive term passes with a constant potential") {
    HalfPlaneGrid g = grid_n(128);
    const ReducedContext ctx(0.1, g, CylMagneticPotential::zero_field(),
                             ScalarPotential::constant(1.0),
                             PenalizationParams{},
                             ConcentrationDomain{0.5, 2.0, 0.5}, 4.0);
    const PeakInfo peak{1.2, 0.0, 1.0};
    // lambda^2 = 0.25 < (1 - mu) inf V = 0.5.
    CHECK(barrier_inequality_check(ctx, peak, 0.5, 0.3, 1.0).pass);
    // lambda^2 above the admissible range fails.
    CHECK_FALSE(barrier_inequality_check(ctx, peak, 0.75, 0.3, 1.0).pass);
  }
  SUBCASE("geometric preconditions are enforced") {
    const ReducedContext ctx = example_context(0.1, 96);
    const PeakInfo peak{1.07, 0.0, 1.0};
    CHECK_THROWS_AS(
        barrier_inequality_check(ctx, peak, 0.3, 2.0, 1.0),  // ball exits
        std::domain_error);
    CHECK_THROWS_AS(
        barrier_inequality_check(ctx, peak, 0.3, 0.3, 5.0),  // eps r >= R
        std::domain_error);
  }
  SUBCASE("reference configuration passes inside the admissible rate range") {
    const ReducedContext ctx = example_context(0.1, 128);
    const PeakInfo peak{1.0745699, 0.0, 1.0};
    // inf V over the closed rectangle is 0.25; take 90% of the threshold.
    const double lambda = std::sqrt(0.9 * 0.5 * 0.25);
    const BarrierCheck chk =
        barrier_inequality_check(ctx, peak, lambda, 0.3, 1.0);
    CHECK(chk.pass);
    CHECK(chk.nodes > 100);
  }
}

TEST_CASE("short sweep produces ordered, converging diagnostics") {
  SweepConfig cfg;
  cfg.solver.grad_tol = 1e-6;
  cfg.solver.max_iters = 8000;
  cfg.barrier_core_radius = 1.0;  // keep the annulus nonempty at eps 0.2
  const std::vector<double> eps_list{0.3, 0.2};
  std::vector<ComplexField> fields;
  const SweepReport rep =
      run_sweep(grid_n(128), CylMagneticPotential::constant_field(1.0),
                ScalarPotential::cylindrical_hardy(1.0, 2.0),
                PenalizationParams{}, ConcentrationDomain{0.5, 2.0, 0.5}, 4.0,
                eps_list, cfg, &fields);
  REQUIRE(rep.records.size() == 2);
  REQUIRE(rep.all_converged);
  CHECK(rep.records[0].eps > rep.records[1].eps);

  // Levels above the segment infimum, approaching it from above.
  for (const auto& r : rep.records) {
    CHECK(r.c_eps_over_eps2 >= rep.m_inf_segment * 0.98);
    CHECK(r.converged);
    CHECK(r.peak_value > 0.5 * 2.2062 * std::sqrt(1.07));
    // Peak stays away from the boundary of the concentration set.
    const ConcentrationDomain dom{0.5, 2.0, 0.5};
    CHECK(dom.boundary_distance(r.peak_rho, r.peak_x3) > 0.2);
    CHECK(std::abs(r.peak_x3) <= 2.0 * grid_n(128).h_x3());
  }
  CHECK(rep.records[1].m_at_peak <= rep.records[0].m_at_peak * 1.001);
  CHECK(rep.records[1].c_eps_over_eps2 <= rep.records[0].c_eps_over_eps2);
  CHECK(rep.records[1].profile_error <= rep.records[0].profile_error * 1.05);
  CHECK(rep.records[1].penalization_violations == 0);
  CHECK(rep.records[1].decay_lambda > 0.0);
  CHECK(rep.records[1].barrier_pass);

  // Squared norms scale like eps^2 with a common constant.
  REQUIRE(fields.size() == 2);
  double lo = 1e300, hi = 0.0;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const double eps = rep.records[k].eps;
    const ReducedContext ctx(eps, grid_n(128),
                             CylMagneticPotential::constant_field(1.0),
                             ScalarPotential::cylindrical_hardy(1.0, 2.0),
                             PenalizationParams{},
                             ConcentrationDomain{0.5, 2.0, 0.5}, 4.0);
    const double ratio = energy_norm(ctx, fields[k]) / (eps * eps);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo <= 1.5);
}

TEST_CASE("increasing eps list is rejected") {
  SweepConfig cfg;
  CHECK_THROWS_AS(
      run_sweep(grid_n(64), CylMagneticPotential::constant_field(1.0),
                ScalarPotential::cylindrical_hardy(1.0, 2.0),
                PenalizationParams{}, ConcentrationDomain{0.5, 2.0, 0.5},
                4.0, {0.2, 0.3}, cfg),
      std::invalid_argument);
}
