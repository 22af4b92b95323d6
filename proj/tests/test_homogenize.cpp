#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mhom/corrector.hpp"
#include "mhom/errors.hpp"
#include "mhom/homogenize.hpp"

using namespace mhom;

namespace {

double fourier_center() {
  double s = 0.0;
  const double pi4 = std::pow(std::numbers::pi, 4);
  for (int m = 1; m < 801; m += 2)
    for (int n = 1; n < 801; n += 2) {
      const double sign = (((m - 1) / 2 + (n - 1) / 2) % 2) ? -1.0 : 1.0;
      s += sign * 16.0 / (pi4 * m * n * (m * m + n * n));
    }
  return s;
}

const auto one = [](Vec2) { return 1.0; };

}  // namespace

TEST_CASE("source presets") {
  for (auto s : {SourcePreset::One, SourcePreset::Tilted, SourcePreset::Zero}) CHECK(parse_source(to_string(s)) == s);
  CHECK_FALSE(parse_source("two").has_value());
  CHECK(source_function(SourcePreset::Tilted)({0.5, 0.25}) == doctest::Approx(2.0));
}

TEST_CASE("hetero problem basics") {
  const CellMesh cell = build_cell_mesh({}, 0.1);
  const auto map = DeformationMap::identity();
  const HeteroSolution z = solve_hetero(cell, map, 0.25, [](Vec2) { return 0.0; }, Conductivity::identity());
  for (double v : z.fem.values) CHECK(v == 0.0);

  // ε = 1/2 has no membrane cells: same as a plain Laplace solve on that mesh.
  const HeteroSolution h = solve_hetero(cell, map, 0.5, one, Conductivity::identity());
  CHECK(h.mesh.interface_pairs.empty());
  const FemSolution plain = solve(assemble(h.mesh, FormSpec{}, LoadSpec{one, std::nullopt}));
  for (std::size_t i = 0; i < plain.values.size(); ++i) CHECK(std::abs(plain.values[i] - h.fem.values[i]) <= 1e-10);

  const HeteroSolution e8 = solve_hetero(cell, map, 0.125, one, Conductivity::identity());
  const NormRecord n = norms(e8.mesh, e8.fem.values);
  CHECK(std::isfinite(n.grad_plus_L2));
  CHECK(std::isfinite(n.grad_minus_L2));
  CHECK(n.jump_L2 > 0.0);
}

TEST_CASE("homogenized solve") {
  const HomogSolution u = solve_homog(Mat2::identity(), one, 128);
  CHECK(std::abs(u.value({0.5, 0.5}) - fourier_center()) <= 1e-4);
  const HomogSolution z = solve_homog(Mat2::identity(), [](Vec2) { return 0.0; }, 32);
  for (double v : z.values()) CHECK(v == 0.0);
  const HomogSolution c = solve_homog(Mat2::diag(2.5, 2.5), one, 64);
  const HomogSolution i = solve_homog(Mat2::identity(), one, 64);
  for (std::size_t k = 0; k < c.values().size(); ++k) CHECK(std::abs(c.values()[k] - i.values()[k] / 2.5) <= 1e-9);
  // Symmetric data on the union-jack grid: the solution inherits the symmetry.
  for (double x : {0.1, 0.3, 0.45})
    for (double y : {0.2, 0.35}) {
      CHECK(std::abs(i.value({x, y}) - i.value({1.0 - x, y})) <= 1e-12);
      CHECK(std::abs(i.value({x, y}) - i.value({y, x})) <= 1e-12);
    }
}

TEST_CASE("P1 interpolant reproduces linear data") {
  const int n = 6;
  std::vector<double> v;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.push_back(2.0 * i / n - 3.0 * j / n + 1.0);
  const HomogSolution u(Mat2::identity(), n, v);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec2 x{d(rng), d(rng)};
    CHECK(u.value(x) == doctest::Approx(2.0 * x.x - 3.0 * x.y + 1.0).epsilon(1e-13));
    CHECK(norm(u.gradient(x) - Vec2{2.0, -3.0}) <= 1e-11);
  }
  CHECK_THROWS_AS(u.value({1.1, 0.5}), MeshMismatch);
  CHECK_THROWS_AS(u.value({0.5, -0.01}), MeshMismatch);
}

TEST_CASE("error suite on an injected exact solution") {
  const int n = 32;
  const HomogSolution u0 = solve_homog(Mat2::identity(), one, n);
  HeteroSolution ue;
  ue.eps = 0.25;
  ue.mesh = build_square_mesh(n);
  ue.fem.values = u0.values();
  const ConvergenceRow r = error_suite(ue, u0, Conductivity::identity(), 0.0, one);
  CHECK(r.l2_error <= 1e-14);
  CHECK(r.jump_l2 == 0.0);
  for (double x : r.flux_res) CHECK(x <= 1e-14);
  for (double x : r.mass_res) CHECK(x <= 1e-14);
  CHECK(r.f_l2 == doctest::Approx(1.0));
}

TEST_CASE("rate fit") {
  const std::vector<double> eps{0.25, 0.125, 0.0625};
  const RateFit a = rate_fit(eps, {0.25 * 3, 0.125 * 3, 0.0625 * 3});
  CHECK(std::abs(a.exponent - 1.0) <= 1e-12);
  CHECK(a.r2 == doctest::Approx(1.0));
  const RateFit b = rate_fit(eps, {std::sqrt(0.25), std::sqrt(0.125), std::sqrt(0.0625)});
  CHECK(std::abs(b.exponent - 0.5) <= 1e-12);
  CHECK_THROWS_AS(rate_fit(eps, {1.0, 0.0, 1.0}), DegenerateFit);
  CHECK_THROWS_AS(rate_fit({0.5, 0.25}, {1.0, 0.5}), DegenerateFit);
}

TEST_CASE("small sweep: errors shrink") {
  const CellMesh cell = build_cell_mesh({}, 0.1);
  const HomogSolution u0 = solve_homog(periodic_tensor(cell, Conductivity::identity()), one, 64);
  std::vector<double> l2;
  for (double eps : {0.25, 0.125}) {
    const HeteroSolution ue = solve_hetero(cell, DeformationMap::identity(), eps, one, Conductivity::identity());
    const ConvergenceRow r = error_suite(ue, u0, Conductivity::identity(), cell.mesh.region_area(Region::Minus), one);
    l2.push_back(r.l2_error);
    CHECK(r.jump_over_sqrt_eps == doctest::Approx(r.jump_l2 / std::sqrt(eps)));
    CHECK(r.energy_ratio() > 0.0);
  }
  CHECK(l2[1] < l2[0]);
}
