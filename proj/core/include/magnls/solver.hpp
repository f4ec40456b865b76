#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magnls/limit.hpp"
#include "magnls/reduced.hpp"

namespace magnls {

enum class StepRule { kFixed, kArmijo };

struct SolveConfig {
  int max_iters = 20000;
  double grad_tol = 1e-8;  // weighted gradient norm relative to the field norm
  StepRule step_rule = StepRule::kArmijo;
  double nehari_tol = 1e-13;  // relative bracket width of the ray bisection
  double fixed_step = 0.0;    // used when step_rule == kFixed (0: estimate)
  /// Restart from perturbed centers when the converged level overshoots
  /// the concentration-function bound by more than this relative margin.
  double level_guard_margin = 0.10;
  int max_restarts = 3;
  bool verbose = false;
  /// When set, the action value of every accepted iterate is appended.
  std::vector<double>* energy_trace = nullptr;
};

enum class SolveStatus { kConverged, kMaxIterations, kRayDegenerate };

struct SolveResult {
  ComplexField field;
  double c_eps = 0.0;      // value of the penalized action at the iterate
  double residual = 0.0;   // weighted gradient norm, relative
  int iterations = 0;
  double peak_rho = 0.0;
  double peak_x3 = 0.0;
  double peak_value = 0.0;
  SolveStatus status = SolveStatus::kMaxIterations;
  bool near_degenerate = false;  // restarts found a distinct basin at the
                                 // same level
  std::string message;
  bool converged() const { return status == SolveStatus::kConverged; }
};

/// Scale t* > 0 with d/dt J(t u)|_{t*} = 0, by bracketing + bisection on
/// the nonincreasing ray slope. Throws std::runtime_error when the ray
/// never turns (initial data supported where the penalized branch caps
/// growth).
double nehari_scale(const ReducedContext& ctx, const ComplexField& u,
                    double tol = 1e-13);

/// Rescales u onto the discrete Nehari manifold in place.
void nehari_project(const ReducedContext& ctx, ComplexField& u,
                    double tol = 1e-13);

/// Concentration ansatz: rescaled limit ground state at a0 = c^2 + V
/// evaluated at the center, gauge phase from the local (phi, a3), and a
/// smooth cutoff supported in Lambda. Throws when the center lies outside.
ComplexField make_init_guess(const ReducedContext& ctx, double rho0,
                             double x30);

/// Nehari-constrained projected gradient descent from the given initial
/// field. Non-convergence is reported through SolveResult::status with the
/// best iterate retained.
SolveResult solve_penalized(const ReducedContext& ctx, const SolveConfig& cfg,
                            const ComplexField& init);

/// Convenience driver: builds the ansatz at the concentration-function
/// minimizer (or the supplied center), solves, and applies the restart
/// guard against the upper level bound.
SolveResult solve_from_center(const ReducedContext& ctx, const SolveConfig& cfg,
                              std::optional<std::pair<double, double>> center =
                                  std::nullopt);

}  // namespace magnls
