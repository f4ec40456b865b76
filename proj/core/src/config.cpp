#include "magnls/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace magnls {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

namespace {

CylMagneticPotential parse_magnetic(const json& j,
                                    std::vector<std::string>& violations) {
  const std::string family = j.value("family", "constant-field");
  if (family == "constant-field") {
    return CylMagneticPotential::constant_field(j.value("b", 1.0));
  }
  if (family == "tangential-power") {
    return CylMagneticPotential::tangential_power(j.value("coef", 1.0),
                                                  j.value("power", 1.0));
  }
  if (family == "custom-tabulated") {
    const auto load = [&](const char* key) -> std::shared_ptr<const Table2D> {
      if (!j.contains(key)) return nullptr;
      return std::make_shared<Table2D>(
          Table2D::from_csv(j.at(key).get<std::string>()));
    };
    return CylMagneticPotential::tabulated(load("phi_csv"), load("c_csv"),
                                           load("a3_csv"));
  }
  violations.push_back("magnetic.family: unknown family '" + family + "'");
  return CylMagneticPotential::zero_field();
}

ScalarPotential parse_scalar(const json& j,
                             std::vector<std::string>& violations) {
  const std::string family = j.value("family", "constant");
  ScalarPotential pot;
  if (family == "constant") {
    pot = ScalarPotential::constant(j.value("value", 1.0));
  } else if (family == "cylindrical-hardy") {
    pot = ScalarPotential::cylindrical_hardy(j.value("strength", 1.0),
                                             j.value("alpha", 2.0));
  } else if (family == "radial-power") {
    pot = ScalarPotential::radial_power(j.value("strength", 1.0),
                                        j.value("alpha", 2.0));
  } else if (family == "compact-bump") {
    pot = ScalarPotential::compact_bump(j.value("strength", 1.0),
                                        j.value("rho_center", 1.0),
                                        j.value("radius", 0.5));
  } else if (family == "zero-minimum-well") {
    pot = ScalarPotential::zero_minimum_well(j.value("scale", 1.0),
                                             j.value("rho_center", 1.0));
  } else {
    violations.push_back("scalar.family: unknown family '" + family + "'");
  }
  if (j.contains("alpha_inf")) pot.alpha_inf = j.at("alpha_inf").get<double>();
  if (j.contains("alpha_zero")) pot.alpha_zero = j.at("alpha_zero").get<double>();
  return pot;
}

}  // namespace

ConfigResult parse_config(const std::string& text,
                          const std::string& source_name) {
  ConfigResult result;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& err) {
    result.violations.push_back(std::string("malformed JSON in ") +
                                source_name + ": " + err.what());
    return result;
  }

  RunConfig cfg;
  cfg.config_hash = fnv1a_hex(text);
  auto& v = result.violations;
  try {
    cfg.p = j.value("p", 4.0);
    if (j.contains("magnetic")) cfg.magnetic = parse_magnetic(j["magnetic"], v);
    if (j.contains("scalar")) cfg.scalar = parse_scalar(j["scalar"], v);
    if (j.contains("domain")) {
      cfg.domain.rho_lo = j["domain"].value("rho_lo", 0.5);
      cfg.domain.rho_hi = j["domain"].value("rho_hi", 2.0);
      cfg.domain.x3_half_width = j["domain"].value("x3_half_width", 0.5);
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      cfg.grid.rho_min = g.value("rho_min", 0.1);
      cfg.grid.rho_max = g.value("rho_max", 4.0);
      cfg.grid.x3_min = g.value("x3_min", -2.0);
      cfg.grid.x3_max = g.value("x3_max", 2.0);
      cfg.grid.n_rho = g.value("n_rho", 256);
      cfg.grid.n_x3 = g.value("n_x3", 256);
    }
    if (j.contains("penalization")) {
      const auto& pj = j["penalization"];
      cfg.penalization.mu = pj.value("mu", 0.5);
      cfg.penalization.kappa = pj.value("kappa", 0.2);
      cfg.penalization.beta = pj.value("beta", 1.0);
    }
    cfg.eps_list = j.value("eps", std::vector<double>{0.4, 0.2, 0.1});
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      cfg.solver.max_iters = s.value("max_iters", 20000);
      cfg.solver.grad_tol = s.value("grad_tol", 1e-8);
      cfg.solver.nehari_tol = s.value("nehari_tol", 1e-13);
      const std::string rule = s.value("step_rule", "armijo");
      if (rule == "fixed") {
        cfg.solver.step_rule = StepRule::kFixed;
        cfg.solver.fixed_step = s.value("fixed_step", 0.0);
      } else if (rule == "armijo") {
        cfg.solver.step_rule = StepRule::kArmijo;
      } else {
        v.push_back("solver.step_rule: must be 'fixed' or 'armijo'");
      }
      if (s.contains("init_center")) {
        const auto& c = s["init_center"];
        cfg.init_center = std::make_pair(c.at(0).get<double>(),
                                         c.at(1).get<double>());
      }
    }
    if (j.contains("vortex")) {
      cfg.vortex_k = j["vortex"].value("k", 0);
      cfg.vortex_amplitude = j["vortex"].value("amplitude", 1.0);
    }
    cfg.output_dir = j.value("output_dir", "out");
    cfg.seed = j.value("seed", std::uint64_t(1));
  } catch (const json::exception& err) {
    v.push_back(std::string("malformed field: ") + err.what());
    return result;
  }

  // Admissibility predicates. Each failed check names the rule.
  if (!(cfg.p > 2.0)) v.push_back("p: exponent must satisfy p > 2");
  if (!(cfg.penalization.mu > 0.0 && cfg.penalization.mu < 1.0)) {
    v.push_back("penalization.mu: must lie in (0, 1)");
  }
  if (!(cfg.penalization.kappa > 0.0 && cfg.penalization.kappa < 0.25)) {
    v.push_back("penalization.kappa: must lie in (0, 1/4)");
  }
  if (!(cfg.penalization.beta > 0.0)) {
    v.push_back("penalization.beta: must be positive");
  }
  if (!cfg.grid.valid()) {
    v.push_back("grid: needs rho_min > 0, increasing extents, >= 8 nodes");
  }
  if (!cfg.domain.valid()) {
    v.push_back(
        "domain: needs 0 < rho_lo < rho_hi and x3_half_width > 0 "
        "(closure must avoid the symmetry axis)");
  }
  if (cfg.grid.valid() && cfg.domain.valid()) {
    const double mr = 0.1 * (cfg.grid.rho_max - cfg.grid.rho_min) - 1e-12;
    const double mz = 0.1 * (cfg.grid.x3_max - cfg.grid.x3_min) - 1e-12;
    if (cfg.domain.rho_lo - cfg.grid.rho_min < mr ||
        cfg.grid.rho_max - cfg.domain.rho_hi < mr ||
        cfg.grid.x3_max - cfg.domain.x3_half_width < mz ||
        cfg.domain.x3_half_width + cfg.grid.x3_min > -mz) {
      v.push_back(
          "domain: closure must sit inside the grid with a 10% margin per "
          "extent");
    }
  }
  if (cfg.p > 2.0 && cfg.p <= 4.0) {
    if (!cfg.scalar.alpha_inf.has_value()) {
      v.push_back(
          "scalar.alpha_inf: exponents 2 < p <= 4 require a declared "
          "far-field decay exponent alpha_inf <= 2");
    } else if (*cfg.scalar.alpha_inf > 2.0) {
      v.push_back("scalar.alpha_inf: declared exponent must satisfy alpha <= 2");
    }
  }
  if (cfg.scalar.alpha_zero.has_value() && *cfg.scalar.alpha_zero < 2.0) {
    v.push_back("scalar.alpha_zero: declared exponent must satisfy alpha >= 2");
  }
  if (cfg.eps_list.empty()) v.push_back("eps: list must not be empty");
  for (std::size_t k = 0; k < cfg.eps_list.size(); ++k) {
    if (cfg.eps_list[k] <= 0.0) {
      v.push_back("eps: all entries must be positive");
      break;
    }
    if (k > 0 && cfg.eps_list[k] >= cfg.eps_list[k - 1]) {
      v.push_back("eps: list must be strictly decreasing");
      break;
    }
  }
  if (cfg.solver.max_iters < 1) v.push_back("solver.max_iters: must be >= 1");
  if (!(cfg.solver.grad_tol > 0.0)) {
    v.push_back("solver.grad_tol: must be positive");
  }
  // Nonnegativity spot check of the scalar potential on the grid range.
  if (cfg.grid.valid()) {
    for (double rho : {cfg.grid.rho_min, 0.5 * (cfg.grid.rho_min + cfg.grid.rho_max),
                       cfg.grid.rho_max}) {
      for (double z : {cfg.grid.x3_min, 0.0, cfg.grid.x3_max}) {
        if (cfg.scalar.eval(rho, z) < 0.0) {
          v.push_back("scalar: potential must be nonnegative");
          break;
        }
      }
    }
  }

  if (v.empty()) result.config = std::move(cfg);
  return result;
}

ConfigResult load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ConfigResult result;
    result.violations.push_back("cannot open config file: " + path);
    return result;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace magnls
