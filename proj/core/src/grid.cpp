#include "magnls/grid.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace magnls {

void ComplexField::zero_boundary() {
  for (int i = 0; i < grid.n_rho; ++i) {
    at(i, 0) = Complex{0.0, 0.0};
    at(i, grid.n_x3 - 1) = Complex{0.0, 0.0};
  }
  for (int j = 0; j < grid.n_x3; ++j) {
    at(0, j) = Complex{0.0, 0.0};
    at(grid.n_rho - 1, j) = Complex{0.0, 0.0};
  }
}

bool ComplexField::boundary_is_zero(double tol) const {
  for (int i = 0; i < grid.n_rho; ++i) {
    if (std::abs(at(i, 0)) > tol || std::abs(at(i, grid.n_x3 - 1)) > tol) {
      return false;
    }
  }
  for (int j = 0; j < grid.n_x3; ++j) {
    if (std::abs(at(0, j)) > tol || std::abs(at(grid.n_rho - 1, j)) > tol) {
      return false;
    }
  }
  return true;
}

double node_weight(const HalfPlaneGrid& grid, int i, int j) {
  const double ti = (i == 0 || i == grid.n_rho - 1) ? 0.5 : 1.0;
  const double tj = (j == 0 || j == grid.n_x3 - 1) ? 0.5 : 1.0;
  return 2.0 * M_PI * grid.rho(i) * ti * tj * grid.h_rho() * grid.h_x3();
}

double integrate(const HalfPlaneGrid& grid, const std::vector<double>& f) {
  if (f.size() != grid.size()) {
    throw std::invalid_argument("integrate: sample size mismatch");
  }
  double sum = 0.0;
  for (int i = 0; i < grid.n_rho; ++i) {
    const double ti = (i == 0 || i == grid.n_rho - 1) ? 0.5 : 1.0;
    const double wr = 2.0 * M_PI * grid.rho(i) * ti;
    double row = 0.0;
    const double* fi = &f[grid.idx(i, 0)];
    row += 0.5 * fi[0] + 0.5 * fi[grid.n_x3 - 1];
    for (int j = 1; j + 1 < grid.n_x3; ++j) row += fi[j];
    sum += wr * row;
  }
  return sum * grid.h_rho() * grid.h_x3();
}

double weighted_inner(const HalfPlaneGrid& grid, const std::vector<Complex>& a,
                      const std::vector<Complex>& b) {
  double sum = 0.0;
  for (int i = 0; i < grid.n_rho; ++i) {
    const double ti = (i == 0 || i == grid.n_rho - 1) ? 0.5 : 1.0;
    const double wr = 2.0 * M_PI * grid.rho(i) * ti;
    double row = 0.0;
    for (int j = 0; j < grid.n_x3; ++j) {
      const double tj = (j == 0 || j == grid.n_x3 - 1) ? 0.5 : 1.0;
      const std::size_t id = grid.idx(i, j);
      row += tj * (a[id].real() * b[id].real() + a[id].imag() * b[id].imag());
    }
    sum += wr * row;
  }
  return sum * grid.h_rho() * grid.h_x3();
}

double weighted_norm(const HalfPlaneGrid& grid, const std::vector<Complex>& a) {
  return std::sqrt(weighted_inner(grid, a, a));
}

void write_field(const std::string& path, const ComplexField& field,
                 double eps, double p) {
  nlohmann::json header;
  header["format"] = "magnls-field-v1";
  header["grid"] = {{"rho_min", field.grid.rho_min},
                    {"rho_max", field.grid.rho_max},
                    {"x3_min", field.grid.x3_min},
                    {"x3_max", field.grid.x3_max},
                    {"n_rho", field.grid.n_rho},
                    {"n_x3", field.grid.n_x3}};
  header["eps"] = eps;
  header["p"] = p;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_field: cannot open " + path);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), std::streamsize(text.size()));
  for (const Complex& z : field.values) {
    const double re = z.real(), im = z.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
}

ComplexField read_field(const std::string& path, FieldFileHeader* header_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_field: cannot open " + path);
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string text(len, '\0');
  in.read(text.data(), std::streamsize(len));
  const auto header = nlohmann::json::parse(text);
  if (header.at("format") != "magnls-field-v1") {
    throw std::runtime_error("read_field: unknown container format");
  }
  HalfPlaneGrid grid;
  const auto& g = header.at("grid");
  grid.rho_min = g.at("rho_min");
  grid.rho_max = g.at("rho_max");
  grid.x3_min = g.at("x3_min");
  grid.x3_max = g.at("x3_max");
  grid.n_rho = g.at("n_rho");
  grid.n_x3 = g.at("n_x3");
  ComplexField field(grid);
  for (Complex& z : field.values) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof(re));
    in.read(reinterpret_cast<char*>(&im), sizeof(im));
    z = Complex{re, im};
  }
  if (!in) throw std::runtime_error("read_field: truncated payload");
  if (header_out) {
    header_out->eps = header.at("eps");
    header_out->p = header.at("p");
  }
  return field;
}

void write_modulus_csv(const std::string& path, const ComplexField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_modulus_csv: cannot open " + path);
  out << "rho,x3,abs\n";
  out.precision(17);
  for (int i = 0; i < field.grid.n_rho; ++i) {
    for (int j = 0; j < field.grid.n_x3; ++j) {
      out << field.grid.rho(i) << ',' << field.grid.x3(j) << ','
          << std::abs(field.at(i, j)) << '\n';
    }
  }
}

}  // namespace magnls
