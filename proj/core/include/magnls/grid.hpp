#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "magnls/geometry.hpp"

namespace magnls {

/// Uniform truncated (rho, x3) half-plane grid. rho_min > 0 keeps the
/// singular potentials away from their poles. Nodes are indexed row-major
/// with rho varying slowest.
struct HalfPlaneGrid {
  double rho_min = 0.1, rho_max = 4.0;
  double x3_min = -2.0, x3_max = 2.0;
  int n_rho = 256, n_x3 = 256;

  double h_rho() const { return (rho_max - rho_min) / (n_rho - 1); }
  double h_x3() const { return (x3_max - x3_min) / (n_x3 - 1); }
  double rho(int i) const { return rho_min + i * h_rho(); }
  double x3(int j) const { return x3_min + j * h_x3(); }
  std::size_t size() const { return std::size_t(n_rho) * n_x3; }
  std::size_t idx(int i, int j) const { return std::size_t(i) * n_x3 + j; }
  bool valid() const {
    return rho_min > 0.0 && rho_max > rho_min && x3_max > x3_min &&
           n_rho >= 8 && n_x3 >= 8;
  }
  bool operator==(const HalfPlaneGrid&) const = default;
};

using Complex = std::complex<double>;

/// Nodal complex values on a HalfPlaneGrid with Dirichlet-zero edges.
struct ComplexField {
  HalfPlaneGrid grid;
  std::vector<Complex> values;

  ComplexField() = default;
  explicit ComplexField(const HalfPlaneGrid& g)
      : grid(g), values(g.size(), Complex{0.0, 0.0}) {}

  Complex& at(int i, int j) { return values[grid.idx(i, j)]; }
  const Complex& at(int i, int j) const { return values[grid.idx(i, j)]; }

  void zero_boundary();
  bool boundary_is_zero(double tol = 0.0) const;
};

/// Trapezoid quadrature with the cylindrical weight 2*pi*rho of a nodal
/// scalar sample f (row-major, same layout as ComplexField).
double integrate(const HalfPlaneGrid& grid, const std::vector<double>& f);

/// Nodal trapezoid weight 2*pi*rho_i tau_i tau_j h_rho h_x3.
double node_weight(const HalfPlaneGrid& grid, int i, int j);

/// Weighted real inner product sum w_ij Re(a conj(b)) and its norm.
double weighted_inner(const HalfPlaneGrid& grid, const std::vector<Complex>& a,
                      const std::vector<Complex>& b);
double weighted_norm(const HalfPlaneGrid& grid, const std::vector<Complex>& a);

/// Binary container: u64 little-endian header length, JSON header
/// {format, grid, eps, p}, then interleaved little-endian f64 (re, im)
/// row-major.
void write_field(const std::string& path, const ComplexField& field,
                 double eps, double p);
struct FieldFileHeader {
  double eps = 0.0;
  double p = 0.0;
};
ComplexField read_field(const std::string& path, FieldFileHeader* header = nullptr);

/// CSV export `rho,x3,abs` of the modulus, row-major.
void write_modulus_csv(const std::string& path, const ComplexField& field);

}  // namespace magnls
