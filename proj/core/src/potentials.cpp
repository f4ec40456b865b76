#include "magnls/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace magnls {

namespace {

// Golden-section refinement of a 1D minimum inside [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

// Dense scan of f over [a, b], then golden-section around the best sample.
double scan_min(const std::function<double(double)>& f, double a, double b,
                int n, double tol) {
  double best = f(a);
  double best_x = a;
  for (int i = 1; i < n; ++i) {
    const double x = a + (b - a) * i / (n - 1);
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  const double h = (b - a) / (n - 1);
  const double lo = std::max(a, best_x - h);
  const double hi = std::min(b, best_x + h);
  return std::min(best, golden_min(f, lo, hi, tol));
}

}  // namespace

Table2D::Table2D(std::vector<double> rho, std::vector<double> x3,
                 std::vector<double> values)
    : rho_(std::move(rho)), x3_(std::move(x3)), values_(std::move(values)) {
  if (rho_.size() < 2 || x3_.size() < 2 ||
      values_.size() != rho_.size() * x3_.size()) {
    throw std::invalid_argument("Table2D: inconsistent axis/value sizes");
  }
  if (!std::is_sorted(rho_.begin(), rho_.end()) ||
      !std::is_sorted(x3_.begin(), x3_.end())) {
    throw std::invalid_argument("Table2D: axes must be sorted ascending");
  }
}

Table2D Table2D::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("Table2D: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("Table2D: empty file");
  // Header must be rho,x3,value.
  std::vector<double> rho_col, x3_col, val_col;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    double v[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ss, tok, ',')) {
        throw std::runtime_error("Table2D: malformed row: " + line);
      }
      v[k] = std::stod(tok);
    }
    rho_col.push_back(v[0]);
    x3_col.push_back(v[1]);
    val_col.push_back(v[2]);
  }
  // Row-major: rho varies slowest. Recover the two axes.
  std::vector<double> rho_axis, x3_axis;
  for (double r : rho_col) {
    if (rho_axis.empty() || r != rho_axis.back()) rho_axis.push_back(r);
  }
  const std::size_t n_x3 = rho_col.size() / rho_axis.size();
  x3_axis.assign(x3_col.begin(), x3_col.begin() + n_x3);
  return Table2D(std::move(rho_axis), std::move(x3_axis), std::move(val_col));
}

double Table2D::eval(double rho, double x3) const {
  const auto locate = [](const std::vector<double>& ax, double v, double& t) {
    const auto it = std::upper_bound(ax.begin(), ax.end(), v);
    std::size_t i = it == ax.begin() ? 1 : std::size_t(it - ax.begin());
    i = std::min(i, ax.size() - 1);
    const double lo = ax[i - 1], hi = ax[i];
    t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    return i - 1;
  };
  double tr, tz;
  const std::size_t i = locate(rho_, rho, tr);
  const std::size_t j = locate(x3_, x3, tz);
  const std::size_t n = x3_.size();
  const double v00 = values_[i * n + j];
  const double v01 = values_[i * n + j + 1];
  const double v10 = values_[(i + 1) * n + j];
  const double v11 = values_[(i + 1) * n + j + 1];
  return (1 - tr) * ((1 - tz) * v00 + tz * v01) +
         tr * ((1 - tz) * v10 + tz * v11);
}

CylMagneticPotential CylMagneticPotential::constant_field(double b) {
  CylMagneticPotential p;
  p.family = MagneticFamily::kConstantField;
  p.field_strength = b;
  return p;
}

CylMagneticPotential CylMagneticPotential::tangential_power(double coef,
                                                            double power) {
  CylMagneticPotential p;
  p.family = MagneticFamily::kTangentialPower;
  p.tangential_coef = coef;
  p.tangential_exponent = power;
  return p;
}

CylMagneticPotential CylMagneticPotential::tabulated(
    std::shared_ptr<const Table2D> phi, std::shared_ptr<const Table2D> c,
    std::shared_ptr<const Table2D> a3) {
  CylMagneticPotential p;
  p.family = MagneticFamily::kCustomTabulated;
  p.phi_table = std::move(phi);
  p.c_table = std::move(c);
  p.a3_table = std::move(a3);
  return p;
}

double CylMagneticPotential::phi(double rho, double x3) const {
  if (family == MagneticFamily::kCustomTabulated && phi_table) {
    return phi_table->eval(rho, std::abs(x3));
  }
  return 0.0;
}

double CylMagneticPotential::c(double rho, double x3) const {
  double base = 0.0;
  switch (family) {
    case MagneticFamily::kConstantField:
      base = 0.5 * field_strength * rho;
      break;
    case MagneticFamily::kTangentialPower:
      base = tangential_coef * std::pow(rho, tangential_exponent);
      break;
    case MagneticFamily::kCustomTabulated:
      base = c_table ? c_table->eval(rho, std::abs(x3)) : 0.0;
      break;
  }
  if (tangential_inverse_coef != 0.0) base += tangential_inverse_coef / rho;
  return base;
}

double CylMagneticPotential::a3(double rho, double x3) const {
  if (family == MagneticFamily::kCustomTabulated && a3_table) {
    return a3_table->eval(rho, x3);
  }
  return 0.0;
}

Vec3 eval_vector_potential(const CylMagneticPotential& pot, const Point3& x) {
  const double rho = cyl_radius(x);
  if (rho <= 0.0) {
    throw std::domain_error("eval_vector_potential: point on the symmetry axis");
  }
  const double cos_t = x[0] / rho;
  const double sin_t = x[1] / rho;
  const double pn = pot.phi(rho, x[2]);
  const double pt = pot.c(rho, x[2]);
  const double pz = pot.a3(rho, x[2]);
  return Vec3{pn * cos_t - pt * sin_t, pn * sin_t + pt * cos_t, pz};
}

ScalarPotential ScalarPotential::constant(double v) {
  ScalarPotential p;
  p.family = ScalarFamily::kConstant;
  p.strength = v;
  return p;
}

ScalarPotential ScalarPotential::cylindrical_hardy(double strength,
                                                   double alpha) {
  ScalarPotential p;
  p.family = ScalarFamily::kCylindricalHardy;
  p.strength = strength;
  p.alpha = alpha;
  return p;
}

ScalarPotential ScalarPotential::radial_power(double strength, double alpha) {
  ScalarPotential p;
  p.family = ScalarFamily::kRadialPower;
  p.strength = strength;
  p.alpha = alpha;
  return p;
}

ScalarPotential ScalarPotential::compact_bump(double strength,
                                              double rho_center,
                                              double radius) {
  ScalarPotential p;
  p.family = ScalarFamily::kCompactBump;
  p.strength = strength;
  p.rho_center = rho_center;
  p.radius = radius;
  return p;
}

ScalarPotential ScalarPotential::zero_minimum_well(double scale,
                                                   double rho_center) {
  ScalarPotential p;
  p.family = ScalarFamily::kZeroMinimumWell;
  p.strength = scale;
  p.rho_center = rho_center;
  return p;
}

double ScalarPotential::eval(double rho, double x3) const {
  const double z = std::abs(x3);
  switch (family) {
    case ScalarFamily::kConstant:
      return strength;
    case ScalarFamily::kCylindricalHardy:
      if (rho <= 0.0) throw std::domain_error("ScalarPotential: rho must be > 0");
      return strength / std::pow(rho, alpha);
    case ScalarFamily::kRadialPower: {
      const double r = std::hypot(rho, z);
      if (r <= 0.0) throw std::domain_error("ScalarPotential: singular at origin");
      return strength / std::pow(r, alpha);
    }
    case ScalarFamily::kCompactBump: {
      const double d2 = (rho - rho_center) * (rho - rho_center) + z * z;
      const double q = 1.0 - d2 / (radius * radius);
      return q > 0.0 ? strength * q * q : 0.0;
    }
    case ScalarFamily::kZeroMinimumWell:
      return strength * ((rho - rho_center) * (rho - rho_center) + z * z);
  }
  return 0.0;
}

double aux_hardy_potential(const PenalizationParams& params,
                           double dist_origin) {
  if (dist_origin <= 0.0) {
    throw std::domain_error("aux_hardy_potential: singular at the origin");
  }
  const double lg = std::log(dist_origin);
  return params.kappa /
         (dist_origin * dist_origin *
          std::pow(lg * lg + 1.0, 0.5 * (1.0 + params.beta)));
}

double aux_hardy_potential(const PenalizationParams& params, const Point3& x) {
  return aux_hardy_potential(params,
                             std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
}

EquivarianceReport check_equivariance(const CylMagneticPotential& pot,
                                      int sample_count, double tol,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> radius(0.2, 3.0);
  std::uniform_real_distribution<double> height(-1.5, 1.5);
  std::bernoulli_distribution reflect(0.5);

  EquivarianceReport rep;
  rep.samples = sample_count;
  for (int s = 0; s < sample_count; ++s) {
    const double theta = angle(rng);
    const double rho = radius(rng);
    const Point3 x{rho * std::cos(theta), rho * std::sin(theta), height(rng)};
    const double alpha = angle(rng);
    const double sgn = reflect(rng) ? -1.0 : 1.0;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    // g = rotation by alpha composed with optional x3 reflection.
    const auto apply_g = [&](const Vec3& v) {
      return Vec3{ca * v[0] - sa * v[1], sa * v[0] + ca * v[1], sgn * v[2]};
    };
    const Point3 ginv_x{ca * x[0] + sa * x[1], -sa * x[0] + ca * x[1],
                        sgn * x[2]};
    const Vec3 lhs = apply_g(eval_vector_potential(pot, ginv_x));
    const Vec3 rhs = eval_vector_potential(pot, x);
    const double viol = std::sqrt((lhs[0] - rhs[0]) * (lhs[0] - rhs[0]) +
                                  (lhs[1] - rhs[1]) * (lhs[1] - rhs[1]) +
                                  (lhs[2] - rhs[2]) * (lhs[2] - rhs[2]));
    rep.max_violation = std::max(rep.max_violation, viol);
  }
  rep.pass = rep.max_violation <= tol;
  return rep;
}

LambdaConditionsReport check_lambda_conditions(
    const ConcentrationDomain& dom,
    const std::function<double(double, double)>& mfun, const ScalarPotential& V,
    int samples_per_edge) {
  if (!dom.valid()) {
    throw std::domain_error("check_lambda_conditions: invalid domain");
  }
  const int n = std::max(samples_per_edge, 8);
  const double tol = 1e-10 * (dom.rho_hi - dom.rho_lo);

  // Interior of the x3 = 0 segment; sampling stays strictly inside.
  const double eps_edge = (dom.rho_hi - dom.rho_lo) / (4.0 * n);
  const auto m_seg = [&](double r) { return mfun(r, 0.0); };
  LambdaConditionsReport rep;
  rep.inf_segment =
      scan_min(m_seg, dom.rho_lo + eps_edge, dom.rho_hi - eps_edge, n, tol);
  rep.inf_segment_boundary =
      std::min(mfun(dom.rho_lo, 0.0), mfun(dom.rho_hi, 0.0));

  // Infimum over the closed rectangle: dense grid + 1D refinement along
  // the best row and column.
  double best = rep.inf_segment;
  double best_r = 0.0, best_z = 0.0;
  const int nz = std::max(n / 8, 64);
  for (int i = 0; i < n; ++i) {
    const double r = dom.rho_lo + (dom.rho_hi - dom.rho_lo) * i / (n - 1);
    for (int j = 0; j < nz; ++j) {
      const double z = -dom.x3_half_width +
                       2.0 * dom.x3_half_width * j / (nz - 1);
      const double v = mfun(r, z);
      if (v < best) {
        best = v;
        best_r = r;
        best_z = z;
      }
    }
  }
  if (best < rep.inf_segment) {
    const double hr = (dom.rho_hi - dom.rho_lo) / (n - 1);
    const double lo = std::max(dom.rho_lo, best_r - hr);
    const double hi = std::min(dom.rho_hi, best_r + hr);
    best = std::min(best, golden_min([&](double r) { return mfun(r, best_z); },
                                     lo, hi, tol));
  }
  rep.inf_domain = best;

  // inf of V over the closed rectangle.
  double vmin = V.eval(dom.rho_lo, 0.0);
  for (int i = 0; i < n; ++i) {
    const double r = dom.rho_lo + (dom.rho_hi - dom.rho_lo) * i / (n - 1);
    for (int j = 0; j < nz; ++j) {
      const double z = -dom.x3_half_width +
                       2.0 * dom.x3_half_width * j / (nz - 1);
      vmin = std::min(vmin, V.eval(r, z));
    }
  }
  rep.inf_potential = vmin;

  rep.interior_below_boundary = rep.inf_segment < rep.inf_segment_boundary;
  rep.interior_below_twice_domain = rep.inf_segment < 2.0 * rep.inf_domain;
  rep.potential_positive = rep.inf_potential > 0.0;
  return rep;
}

}  // namespace magnls
