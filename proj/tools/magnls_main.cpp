// magnls: concentration experiments for the cylindrically reduced magnetic
// nonlinear Schrodinger problem.
//
// Subcommands: limit, map, solve, sweep, vortex, verify.
// Exit codes: 0 success, 2 config rejection, 3 solver non-convergence,
// 4 invariant-suite failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magnls/report.hpp"
#include "magnls/verify.hpp"
#include "magnls/vortex.hpp"

namespace fs = std::filesystem;
using namespace magnls;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInvariants = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string eps_csv;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int load_or_fail(const CommonArgs& args, RunConfig& cfg) {
  ConfigResult result = load_config(args.config_path);
  if (!result.ok()) {
    std::cerr << "config rejected: " << args.config_path << "\n";
    for (const auto& v : result.violations) std::cerr << "  - " << v << "\n";
    return kExitConfig;
  }
  cfg = std::move(*result.config);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (args.seed_set) cfg.seed = args.seed;
  if (!args.eps_csv.empty()) {
    cfg.eps_list.clear();
    std::stringstream ss(args.eps_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.eps_list.push_back(std::stod(tok));
    for (std::size_t k = 0; k < cfg.eps_list.size(); ++k) {
      if (cfg.eps_list[k] <= 0.0 ||
          (k > 0 && cfg.eps_list[k] >= cfg.eps_list[k - 1])) {
        std::cerr << "config rejected: --eps must be positive and strictly "
                     "decreasing\n";
        return kExitConfig;
      }
    }
  }
  fs::create_directories(cfg.output_dir);
  return kExitOk;
}

int run_limit(const RunConfig& cfg, double a0) {
  const GroundState1D gs = solve_limit_ground_state(a0, cfg.p);
  write_profile_csv(fs::path(cfg.output_dir) / "limit_profile.csv", gs);
  nlohmann::json j;
  j["a0"] = gs.a0;
  j["p"] = gs.p;
  j["energy"] = gs.energy;
  j["mass"] = gs.mass;
  j["height"] = gs.height();
  write_report_json(fs::path(cfg.output_dir) / "limit.json", j, cfg);
  std::cout << "ground energy(a0=" << a0 << ", p=" << cfg.p
            << ") = " << gs.energy << "\n";
  return kExitOk;
}

int run_map(const RunConfig& cfg) {
  const auto handle = make_concentration_handle(cfg.magnetic, cfg.scalar,
                                                cfg.p);
  const auto normalized = make_concentration_handle(
      cfg.magnetic, cfg.scalar, cfg.p, MNormalization::kNormalized);
  const ConcentrationMinimum m = minimize_concentration(handle, cfg.domain);
  write_map_csv(fs::path(cfg.output_dir) / "map.csv", handle, cfg.domain);
  nlohmann::json j;
  j["rho_star"] = m.rho_star;
  j["x3_star"] = m.x3_star;
  j["m_min_with_2pi"] = m.m_min_segment;
  j["m_min_normalized"] = normalized.value(m.rho_star, m.x3_star);
  j["m_inf_domain"] = m.m_inf_domain;
  j["ground_energy_unit"] = handle.e01;
  write_report_json(fs::path(cfg.output_dir) / "map.json", j, cfg);
  std::cout << "rho_star = " << m.rho_star << "\n";
  return kExitOk;
}

int run_solve(const RunConfig& cfg, double eps) {
  const ReducedContext ctx(eps, cfg.grid, cfg.magnetic, cfg.scalar,
                           cfg.penalization, cfg.domain, cfg.p);
  const SolveResult result =
      solve_from_center(ctx, cfg.solver, cfg.init_center);
  write_report_json(fs::path(cfg.output_dir) / "solve.json",
                    solve_result_json(result, eps), cfg);
  write_field(fs::path(cfg.output_dir) / "field.bin", result.field, eps,
              cfg.p);
  write_modulus_csv(fs::path(cfg.output_dir) / "modulus.csv", result.field);
  if (!result.converged()) {
    std::cerr << "solver did not converge (residual " << result.residual
              << ", " << result.iterations << " iterations)\n";
    return kExitSolver;
  }
  std::cout << "c_eps = " << result.c_eps << ", peak rho = " << result.peak_rho
            << "\n";
  return kExitOk;
}

int run_sweep(const RunConfig& cfg) {
  SweepConfig sweep_cfg;
  sweep_cfg.solver = cfg.solver;
  std::vector<ComplexField> fields;
  const SweepReport report =
      run_sweep(cfg.grid, cfg.magnetic, cfg.scalar, cfg.penalization,
                cfg.domain, cfg.p, cfg.eps_list, sweep_cfg, &fields);
  write_report_json(fs::path(cfg.output_dir) / "sweep.json",
                    sweep_report_json(report), cfg);
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const std::string tag = std::to_string(report.records[k].eps);
    write_slice_csv(fs::path(cfg.output_dir) / ("slice_eps_" + tag + ".csv"),
                    fields[k]);
    write_svg_heatmap(
        fs::path(cfg.output_dir) / ("heatmap_eps_" + tag + ".svg"), fields[k]);
  }
  if (!report.all_converged) {
    std::cerr << "sweep finished with solver failures (see sweep.json)\n";
    return kExitSolver;
  }
  std::cout << "sweep complete: " << report.records.size()
            << " records, m_inf = " << report.m_inf_segment << "\n";
  return kExitOk;
}

int run_vortex(const RunConfig& cfg, int k, double eps) {
  const VortexConfig vcfg = VortexConfig::make(k, cfg.vortex_amplitude,
                                               cfg.magnetic, cfg.scalar, cfg.p);
  const VortexSolveResult result =
      solve_vortex(vcfg, eps, cfg.grid, cfg.penalization, cfg.domain,
                   cfg.solver, cfg.init_center);
  nlohmann::json j = solve_result_json(result.solve, eps);
  j["k"] = k;
  j["amplitude"] = cfg.vortex_amplitude;
  j["m_at_peak_normalized"] = result.m_at_peak;
  j["critical_frequency_margin"] =
      critical_frequency_margin(vcfg, cfg.domain);
  write_report_json(fs::path(cfg.output_dir) / "vortex.json", j, cfg);
  write_field(fs::path(cfg.output_dir) / "vortex_field.bin",
              result.solve.field, eps, cfg.p);
  write_modulus_csv(fs::path(cfg.output_dir) / "vortex_modulus.csv",
                    result.solve.field);

  // Theta-slice residual identity between the reconstructed 3D field and
  // the reduced problem.
  const ReconstructionReport rec = reconstruct_vortex(vcfg, eps,
                                                      result.solve.field);
  std::ofstream res_csv(fs::path(cfg.output_dir) / "vortex_residual.csv");
  res_csv << "k,theta_samples,max_residual_diff,max_reduced_residual\n";
  res_csv << k << ',' << rec.theta_samples << ',' << rec.max_residual_diff
          << ',' << rec.max_reduced_residual << '\n';

  if (!result.solve.converged()) {
    std::cerr << "vortex solver did not converge\n";
    return kExitSolver;
  }
  std::cout << "vortex k=" << k << ": peak rho = " << result.solve.peak_rho
            << ", residual identity gap = " << rec.max_residual_diff << "\n";
  return kExitOk;
}

int run_verify(const RunConfig& cfg) {
  const VerifyReport report = run_verify_suites(cfg);
  nlohmann::json suites = nlohmann::json::array();
  for (const SuiteResult& s : report.suites) {
    std::cout << (s.pass ? "PASS" : "FAIL") << "  " << s.name << "  ("
              << s.detail << ")\n";
    suites.push_back({{"name", s.name}, {"pass", s.pass}, {"detail", s.detail}});
  }
  nlohmann::json j;
  j["suites"] = std::move(suites);
  j["all_pass"] = report.all_pass();
  j["seed"] = cfg.seed;
  write_report_json(fs::path(cfg.output_dir) / "verify.json", j, cfg);
  return report.all_pass() ? kExitOk : kExitInvariants;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concentration experiments for the reduced magnetic NLS"};
  app.require_subcommand(1);

  CommonArgs args;
  double a0 = 1.0;
  double eps_single = 0.1;
  bool eps_single_set = false;
  int vortex_k = std::numeric_limits<int>::min();

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "Run configuration (JSON)")
        ->required();
    sub->add_option("--out", args.out_dir, "Output directory override");
    sub->add_option("--seed", args.seed, "Seed override for randomized checks")
        ->each([&](const std::string&) { args.seed_set = true; });
  };

  auto* limit_cmd = app.add_subcommand("limit", "Solve the planar limit ground state");
  add_common(limit_cmd);
  limit_cmd->add_option("--a0", a0, "Limit coefficient c^2 + V");

  auto* map_cmd = app.add_subcommand("map", "Concentration landscape and minimizer");
  add_common(map_cmd);

  auto* solve_cmd = app.add_subcommand("solve", "Single penalized solve");
  add_common(solve_cmd);
  solve_cmd->add_option("--eps", eps_single, "Semiclassical parameter")
      ->each([&](const std::string&) { eps_single_set = true; });

  auto* sweep_cmd = app.add_subcommand("sweep", "Decreasing-eps continuation");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--eps", args.eps_csv,
                        "Comma-separated decreasing eps list");

  auto* vortex_cmd = app.add_subcommand("vortex", "Winding-ansatz real solve");
  add_common(vortex_cmd);
  vortex_cmd->add_option("--k", vortex_k, "Winding number");
  vortex_cmd->add_option("--eps", eps_single, "Semiclassical parameter")
      ->each([&](const std::string&) { eps_single_set = true; });

  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suites");
  add_common(verify_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  RunConfig cfg;
  const int load_status = load_or_fail(args, cfg);
  if (load_status != kExitOk) return load_status;

  try {
    if (limit_cmd->parsed()) return run_limit(cfg, a0);
    if (map_cmd->parsed()) return run_map(cfg);
    if (solve_cmd->parsed()) {
      return run_solve(cfg, eps_single_set ? eps_single
                                           : cfg.eps_list.back());
    }
    if (sweep_cmd->parsed()) return run_sweep(cfg);
    if (vortex_cmd->parsed()) {
      const int k = vortex_k == std::numeric_limits<int>::min() ? cfg.vortex_k
                                                                : vortex_k;
      return run_vortex(cfg, k,
                        eps_single_set ? eps_single : cfg.eps_list.back());
    }
    if (verify_cmd->parsed()) return run_verify(cfg);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
