#include "magnls/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace magnls {

using nlohmann::json;

void write_report_json(const std::string& path, json body,
                       const RunConfig& cfg) {
  body["tool_version"] = kVersion;
  body["config_hash"] = cfg.config_hash;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_json: cannot open " + path);
  out << body.dump(2) << '\n';
}

json solve_result_json(const SolveResult& result, double eps) {
  json j;
  j["eps"] = eps;
  j["c_eps"] = result.c_eps;
  j["c_eps_over_eps2"] = result.c_eps / (eps * eps);
  j["residual"] = result.residual;
  j["iterations"] = result.iterations;
  j["peak"] = {{"rho", result.peak_rho},
               {"x3", result.peak_x3},
               {"value", result.peak_value}};
  j["converged"] = result.converged();
  j["near_degenerate"] = result.near_degenerate;
  if (!result.message.empty()) j["message"] = result.message;
  return j;
}

json sweep_report_json(const SweepReport& report) {
  json records = json::array();
  for (const SweepRecord& r : report.records) {
    records.push_back({{"eps", r.eps},
                       {"c_eps", r.c_eps},
                       {"c_eps_over_eps2", r.c_eps_over_eps2},
                       {"peak", {{"rho", r.peak_rho},
                                 {"x3", r.peak_x3},
                                 {"value", r.peak_value}}},
                       {"m_at_peak", r.m_at_peak},
                       {"profile_error", r.profile_error},
                       {"decay", {{"lambda", r.decay_lambda},
                                  {"constant", r.decay_constant}}},
                       {"penalization_violations", r.penalization_violations},
                       {"barrier_pass", r.barrier_pass},
                       {"converged", r.converged},
                       {"residual", r.residual},
                       {"iterations", r.iterations}});
  }
  json j;
  j["records"] = std::move(records);
  j["m_inf_segment"] = report.m_inf_segment;
  j["all_converged"] = report.all_converged;
  return j;
}

void write_slice_csv(const std::string& path, const ComplexField& field) {
  const HalfPlaneGrid& g = field.grid;
  int j0 = 0;
  double best = std::abs(g.x3(0));
  for (int j = 1; j < g.n_x3; ++j) {
    if (std::abs(g.x3(j)) < best) {
      best = std::abs(g.x3(j));
      j0 = j;
    }
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_slice_csv: cannot open " + path);
  out.precision(17);
  out << "rho,abs\n";
  for (int i = 0; i < g.n_rho; ++i) {
    out << g.rho(i) << ',' << std::abs(field.at(i, j0)) << '\n';
  }
}

namespace {

// Five-stop dark-to-bright colormap, linearly interpolated.
void colormap(double t, int& r, int& gr, int& b) {
  static constexpr double stops[5][3] = {{0.05, 0.03, 0.25},
                                         {0.22, 0.20, 0.55},
                                         {0.12, 0.56, 0.55},
                                         {0.60, 0.80, 0.25},
                                         {0.99, 0.95, 0.15}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(int(t), 3);
  const double f = t - k;
  r = int(255 * ((1 - f) * stops[k][0] + f * stops[k + 1][0]));
  gr = int(255 * ((1 - f) * stops[k][1] + f * stops[k + 1][1]));
  b = int(255 * ((1 - f) * stops[k][2] + f * stops[k + 1][2]));
}

}  // namespace

void write_svg_heatmap(const std::string& path, const ComplexField& field,
                       int max_cells) {
  const HalfPlaneGrid& g = field.grid;
  const int block = std::max(1, (std::max(g.n_rho, g.n_x3) + max_cells - 1) /
                                    max_cells);
  const int nr = (g.n_rho + block - 1) / block;
  const int nz = (g.n_x3 + block - 1) / block;

  std::vector<double> cells(std::size_t(nr) * nz, 0.0);
  double peak = 0.0;
  for (int i = 0; i < g.n_rho; ++i) {
    for (int j = 0; j < g.n_x3; ++j) {
      const double a = std::abs(field.at(i, j));
      auto& cell = cells[std::size_t(i / block) * nz + j / block];
      cell = std::max(cell, a);
      peak = std::max(peak, a);
    }
  }
  if (peak <= 0.0) peak = 1.0;

  const int cell_px = 4;
  const int width = nr * cell_px, height = nz * cell_px;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_svg_heatmap: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<!-- |u| over [" << g.rho_min << ',' << g.rho_max << "] x ["
      << g.x3_min << ',' << g.x3_max << "], peak " << peak << " -->\n";
  for (int ci = 0; ci < nr; ++ci) {
    for (int cj = 0; cj < nz; ++cj) {
      int r, gr, b;
      colormap(cells[std::size_t(ci) * nz + cj] / peak, r, gr, b);
      // x axis: rho; y axis: x3, top row = largest x3.
      out << "<rect x=\"" << ci * cell_px << "\" y=\""
          << (nz - 1 - cj) * cell_px << "\" width=\"" << cell_px
          << "\" height=\"" << cell_px << "\" fill=\"rgb(" << r << ',' << gr
          << ',' << b << ")\"/>\n";
    }
  }
  out << "</svg>\n";
}

void write_map_csv(const std::string& path,
                   const ConcentrationFunctionHandle& handle,
                   const ConcentrationDomain& dom, int n_rho, int n_x3) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_map_csv: cannot open " + path);
  out.precision(17);
  out << "rho,x3,m\n";
  for (int i = 0; i < n_rho; ++i) {
    const double rho = dom.rho_lo + (dom.rho_hi - dom.rho_lo) * i / (n_rho - 1);
    for (int j = 0; j < n_x3; ++j) {
      const double z =
          -dom.x3_half_width + 2.0 * dom.x3_half_width * j / (n_x3 - 1);
      out << rho << ',' << z << ',' << handle.value(rho, z) << '\n';
    }
  }
}

void write_profile_csv(const std::string& path, const GroundState1D& gs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_profile_csv: cannot open " + path);
  out.precision(17);
  out << "r,w\n";
  for (std::size_t k = 0; k < gs.r.size(); ++k) {
    out << gs.r[k] << ',' << gs.w[k] << '\n';
  }
}

}  // namespace magnls
