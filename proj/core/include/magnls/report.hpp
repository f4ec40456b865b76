#pragma once

#include <string>

#include <json.hpp>

#include "magnls/asymptotics.hpp"
#include "magnls/config.hpp"

namespace magnls {

/// Writes a report with the standard envelope fields (tool version and
/// config hash) merged in. Key order is canonical, so re-running with the
/// same config and seed reproduces files byte for byte.
void write_report_json(const std::string& path, nlohmann::json body,
                       const RunConfig& cfg);

nlohmann::json solve_result_json(const SolveResult& result, double eps);
nlohmann::json sweep_report_json(const SweepReport& report);

/// |u| along the grid row closest to x3 = 0, as `rho,abs` CSV.
void write_slice_csv(const std::string& path, const ComplexField& field);

/// Self-contained SVG heatmap of |u| (block-downsampled).
void write_svg_heatmap(const std::string& path, const ComplexField& field,
                       int max_cells = 160);

/// Concentration landscape `rho,x3,m` CSV over the domain rectangle.
void write_map_csv(const std::string& path,
                   const ConcentrationFunctionHandle& handle,
                   const ConcentrationDomain& dom, int n_rho = 256,
                   int n_x3 = 64);

/// Radial profile `r,w` CSV of a limit ground state.
void write_profile_csv(const std::string& path, const GroundState1D& gs);

}  // namespace magnls
