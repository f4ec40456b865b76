#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magnls/asymptotics.hpp"
#include "magnls/grid.hpp"
#include "magnls/potentials.hpp"
#include "magnls/solver.hpp"

namespace magnls {

/// Fully validated run description. Construction happens only through
/// load_config / parse_config, which enforce the admissibility rules on
/// every field.
struct RunConfig {
  CylMagneticPotential magnetic;
  ScalarPotential scalar;
  ConcentrationDomain domain;
  HalfPlaneGrid grid;
  PenalizationParams penalization;
  double p = 4.0;
  std::vector<double> eps_list;
  SolveConfig solver;
  std::optional<std::pair<double, double>> init_center;
  int vortex_k = 0;
  double vortex_amplitude = 1.0;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  std::string config_hash;  // FNV-1a of the source bytes, hex
};

struct ConfigResult {
  std::optional<RunConfig> config;
  std::vector<std::string> violations;  // one line per failed predicate
  bool ok() const { return config.has_value() && violations.empty(); }
};

/// Parses, cross-validates, and returns either the config or the list of
/// violated admissibility predicates. Malformed JSON reports a single
/// violation describing the parse failure.
ConfigResult load_config(const std::string& path);
ConfigResult parse_config(const std::string& json_text,
                          const std::string& source_name = "<inline>");

/// FNV-1a 64-bit hash, hex-encoded; embedded in every emitted report.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace magnls
