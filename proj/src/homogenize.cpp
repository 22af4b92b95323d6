#include "mhom/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mhom/errors.hpp"
#include "mhom/quadrature.hpp"

namespace mhom {

std::string to_string(SourcePreset s) {
  switch (s) {
    case SourcePreset::One: return "one";
    case SourcePreset::Tilted: return "tilted";
    case SourcePreset::Zero: return "zero";
  }
  return "unknown";
}

std::optional<SourcePreset> parse_source(const std::string &name) {
  if (name == "one") return SourcePreset::One;
  if (name == "tilted") return SourcePreset::Tilted;
  if (name == "zero") return SourcePreset::Zero;
  return std::nullopt;
}

std::function<double(Vec2)> source_function(SourcePreset s) {
  switch (s) {
    case SourcePreset::Tilted: return [](Vec2 x) { return 1.0 + x.x + 2.0 * x.y; };
    case SourcePreset::Zero: return [](Vec2) { return 0.0; };
    default: return [](Vec2) { return 1.0; };
  }
}

HeteroSolution solve_hetero(const CellMesh &cell, const DeformationMap &map, double eps,
                            const std::function<double(Vec2)> &f, const Conductivity &A, MembraneRule rule) {
  HeteroSolution out;
  out.eps = eps;
  out.mesh = tile_domain_mesh(cell, map, eps, rule);
  const DiscreteSystem sys = assemble(out.mesh, FormSpec{A, 1.0 / eps, 0.0}, LoadSpec{f, std::nullopt});
  out.fem = solve(sys);
  out.fem.mesh = nullptr;
  return out;
}

HomogSolution::HomogSolution(Mat2 A0, int n, std::vector<double> values)
    : A0_(A0), n_(n), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(n + 1) * (n + 1))
    throw std::invalid_argument("HomogSolution: value array does not match the grid");
}

int HomogSolution::locate(Vec2 x, int &i, int &j) const {
  const double tol = 1e-12;
  if (!(x.x >= -tol && x.x <= 1.0 + tol && x.y >= -tol && x.y <= 1.0 + tol))
    throw MeshMismatch("homogenized solution evaluated outside the unit square");
  const double sx = std::clamp(x.x, 0.0, 1.0) * n_, sy = std::clamp(x.y, 0.0, 1.0) * n_;
  i = std::min(n_ - 1, static_cast<int>(sx));
  j = std::min(n_ - 1, static_cast<int>(sy));
  const double s = sx - i, t = sy - j;
  if (square_main_diagonal(n_, i, j)) return s >= t ? 0 : 1;
  return s + t <= 1.0 ? 2 : 3;
}

double HomogSolution::value(Vec2 x) const {
  int i = 0, j = 0;
  const int tri = locate(x, i, j);
  const double s = std::clamp(x.x, 0.0, 1.0) * n_ - i, t = std::clamp(x.y, 0.0, 1.0) * n_ - j;
  const Vec2 g = gradient(x) * (1.0 / n_);
  const auto u = [&](int a, int b) { return values_[static_cast<std::size_t>(j + b) * (n_ + 1) + (i + a)]; };
  if (tri == 3) return u(1, 1) + (s - 1.0) * g.x + (t - 1.0) * g.y;
  return u(0, 0) + s * g.x + t * g.y;
}

Vec2 HomogSolution::gradient(Vec2 x) const {
  int i = 0, j = 0;
  const int tri = locate(x, i, j);
  const auto u = [&](int a, int b) { return values_[static_cast<std::size_t>(j + b) * (n_ + 1) + (i + a)]; };
  const double n = n_;
  switch (tri) {
    case 0: return {n * (u(1, 0) - u(0, 0)), n * (u(1, 1) - u(1, 0))};
    case 1: return {n * (u(1, 1) - u(0, 1)), n * (u(0, 1) - u(0, 0))};
    case 2: return {n * (u(1, 0) - u(0, 0)), n * (u(0, 1) - u(0, 0))};
    default: return {n * (u(1, 1) - u(0, 1)), n * (u(1, 1) - u(1, 0))};
  }
}

HomogSolution solve_homog(const Mat2 &A0, const std::function<double(Vec2)> &f, int n) {
  // Only the symmetric part enters div(A0 ∇u) for constant A0.
  const Mat2 sym{A0.a11, 0.5 * (A0.a12 + A0.a21), 0.5 * (A0.a12 + A0.a21), A0.a22};
  const Conductivity A = Conductivity::constant(sym);
  const MembraneMesh mesh = build_square_mesh(n);
  const DiscreteSystem sys = assemble(mesh, FormSpec{A, 0.0, 0.0}, LoadSpec{f, std::nullopt});
  const FemSolution sol = solve(sys);
  return HomogSolution(A0, n, sol.values);
}

double bubble(Vec2 x) {
  const double q = x.x * (1.0 - x.x) * x.y * (1.0 - x.y);
  return q * q;
}

std::array<std::function<double(Vec2)>, 4> scalar_tests() {
  return {[](Vec2 x) { return bubble(x); }, [](Vec2 x) { return bubble(x) * x.x; },
          [](Vec2 x) { return bubble(x) * x.y; }, [](Vec2 x) { return bubble(x) * x.x * x.y; }};
}

std::array<std::function<Vec2(Vec2)>, 3> vector_tests() {
  return {[](Vec2 x) { return Vec2{bubble(x), 0.0}; }, [](Vec2 x) { return Vec2{0.0, bubble(x)}; },
          [](Vec2 x) { return Vec2{bubble(x) * x.y, bubble(x) * x.x}; }};
}

namespace {

// Pairings that vanish by symmetry leave only rounding noise; `scale` is the
// pairing of the absolute values.
double residual(double a, double b, double scale) {
  const double d = std::fabs(a - b);
  return d <= kPairingFloor * scale ? 0.0 : d;
}

}  // namespace

ConvergenceRow error_suite(const HeteroSolution &ue, const HomogSolution &u0, const Conductivity &A, double theta,
                           const std::function<double(Vec2)> &f) {
  const MembraneMesh &mesh = ue.mesh;
  const auto &u = ue.fem.values;
  if (u.size() != mesh.num_nodes()) throw MeshMismatch("error_suite: solution does not match its mesh");
  const auto &rule = quad::triangle7();
  const auto phis = scalar_tests();
  const auto psis = vector_tests();

  ConvergenceRow row;
  row.eps = ue.eps;
  double l2 = 0.0;
  std::array<double, 3> flux_e{}, flux_0{};
  std::array<double, 4> mass_e{}, mass_0{};
  std::array<double, 3> flux_abs{};
  std::array<double, 4> mass_abs{};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    const auto G = hat_gradients(a, b, c);
    const Vec2 flux = triangle_conductivity(mesh, A, t) * (u[tri[0]] * G[0] + u[tri[1]] * G[1] + u[tri[2]] * G[2]);
    const bool minus = mesh.regions[t] == Region::Minus;
    for (const auto &q : rule) {
      const Vec2 x = quad::at(q, a, b, c);
      const double w = q.w * area;
      const double ux = q.l1 * u[tri[0]] + q.l2 * u[tri[1]] + q.l3 * u[tri[2]];
      const double d = ux - u0.value(x);
      l2 += w * d * d;
      for (int k = 0; k < 3; ++k) {
        const Vec2 psi = psis[k](x);
        flux_e[k] += w * dot(flux, psi);
        flux_abs[k] += w * norm(flux) * norm(psi);
      }
      for (int k = 0; k < 4; ++k) {
        const double phi = phis[k](x);
        if (minus) mass_e[k] += w * ux * phi;
        mass_abs[k] += w * std::fabs(ux * phi);
      }
    }
  }

  // Homogenized pairings on the structured mesh.
  const int n = u0.n();
  const MembraneMesh sq = build_square_mesh(n);
  double f2 = 0.0;
  for (std::size_t t = 0; t < sq.num_triangles(); ++t) {
    const auto &tri = sq.triangles[t];
    const Vec2 a = sq.vertices[tri[0]], b = sq.vertices[tri[1]], c = sq.vertices[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    const auto G = hat_gradients(a, b, c);
    const auto &v = u0.values();
    const Vec2 flux = u0.A0() * (v[tri[0]] * G[0] + v[tri[1]] * G[1] + v[tri[2]] * G[2]);
    for (const auto &q : rule) {
      const Vec2 x = quad::at(q, a, b, c);
      const double w = q.w * area;
      const double ux = q.l1 * v[tri[0]] + q.l2 * v[tri[1]] + q.l3 * v[tri[2]];
      for (int k = 0; k < 3; ++k) flux_0[k] += w * dot(flux, psis[k](x));
      for (int k = 0; k < 4; ++k) mass_0[k] += w * theta * ux * phis[k](x);
      const double fx = f(x);
      f2 += w * fx * fx;
    }
  }

  const NormRecord nr = norms(mesh, u);
  row.l2_error = std::sqrt(l2);
  row.jump_l2 = nr.jump_L2;
  row.jump_over_sqrt_eps = nr.jump_L2 / std::sqrt(ue.eps);
  row.grad_plus = nr.grad_plus_L2;
  row.grad_minus = nr.grad_minus_L2;
  row.f_l2 = std::sqrt(f2);
  for (int k = 0; k < 3; ++k) row.flux_res[k] = residual(flux_e[k], flux_0[k], flux_abs[k]);
  for (int k = 0; k < 4; ++k) row.mass_res[k] = residual(mass_e[k], mass_0[k], mass_abs[k]);
  return row;
}

RateFit rate_fit(const std::vector<double> &eps, const std::vector<double> &errors) {
  if (eps.size() != errors.size()) throw std::invalid_argument("rate_fit: size mismatch");
  if (eps.size() < 3) throw DegenerateFit("rate_fit: need at least three points");
  for (double e : errors)
    if (!(e > 1e-14)) throw DegenerateFit("rate_fit: error at or below 1e-14");
  const std::size_t n = eps.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0)) throw DegenerateFit("rate_fit: eps must be positive");
    x[i] = std::log(eps[i]);
    y[i] = std::log(errors[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateFit("rate_fit: all eps values coincide");
  RateFit fit;
  fit.exponent = sxy / sxx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace mhom
