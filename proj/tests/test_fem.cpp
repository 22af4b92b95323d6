#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mhom/corrector.hpp"
#include "mhom/fem.hpp"
#include "mhom/mesh.hpp"

using namespace mhom;

namespace {

// Degree-4 six-point rule on the reference triangle (weights sum to 1).
struct P6 {
  double l1, l2, w;
};
const P6 kRule6[] = {{0.445948490915965, 0.445948490915965, 0.223381589678011},
                     {0.445948490915965, 0.108103018168070, 0.223381589678011},
                     {0.108103018168070, 0.445948490915965, 0.223381589678011},
                     {0.091576213509771, 0.091576213509771, 0.109951743655322},
                     {0.091576213509771, 0.816847572980459, 0.109951743655322},
                     {0.816847572980459, 0.091576213509771, 0.109951743655322}};

double tri_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

Vec2 p1_gradient(Vec2 a, Vec2 b, Vec2 c, double ua, double ub, double uc) {
  // Solve [b-a; c-a] g = [ub-ua; uc-ua].
  const Mat2 M{b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y};
  return M.inverse() * Vec2{ub - ua, uc - ua};
}

// Independent norms: six-point rule for u^2, constant gradients, three-point
// Gauss on interface segments.
NormRecord oracle_norms(const MembraneMesh &m, const std::vector<double> &u) {
  double gp = 0.0, gm = 0.0, l2 = 0.0, jump = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto &tr = m.triangles[t];
    const Vec2 a = m.vertices[tr[0]], b = m.vertices[tr[1]], c = m.vertices[tr[2]];
    const double A = tri_area(a, b, c);
    const Vec2 g = p1_gradient(a, b, c, u[tr[0]], u[tr[1]], u[tr[2]]);
    (m.regions[t] == Region::Plus ? gp : gm) += A * dot(g, g);
    for (const auto &q : kRule6) {
      const double v = q.l1 * u[tr[0]] + q.l2 * u[tr[1]] + (1.0 - q.l1 - q.l2) * u[tr[2]];
      l2 += A * q.w * v * v;
    }
  }
  const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}, gw[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
  for (const auto &s : m.interface_segments) {
    const auto &pa = m.interface_pairs[s[0]], &pb = m.interface_pairs[s[1]];
    const double ja = u[pa[0]] - u[pa[1]], jb = u[pb[0]] - u[pb[1]];
    const double L = norm(m.vertices[pb[0]] - m.vertices[pa[0]]);
    for (int i = 0; i < 3; ++i) {
      const double s01 = 0.5 * (gx[i] + 1.0);
      const double j = (1.0 - s01) * ja + s01 * jb;
      jump += 0.5 * L * gw[i] * j * j;
    }
  }
  return {std::sqrt(gp), std::sqrt(gm), std::sqrt(jump), std::sqrt(l2)};
}

MembraneMesh single_triangle() {
  MembraneMesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.reference = m.vertices;
  m.triangles = {{0, 1, 2}};
  m.regions = {Region::Plus};
  m.triangle_cells = {{0, 0}};
  return m;
}

// PLUS triangle below and MINUS triangle above a doubled edge of length L.
MembraneMesh membrane_pair(double L) {
  MembraneMesh m;
  m.vertices = {{0, 0}, {L, 0}, {0, 0}, {L, 0}, {0.5 * L, -1}, {0.5 * L, 1}};
  m.reference = m.vertices;
  m.triangles = {{0, 4, 1}, {2, 3, 5}};
  m.regions = {Region::Plus, Region::Minus};
  m.triangle_cells = {{0, 0}, {0, 0}};
  m.interface_pairs = {{0, 2}, {1, 3}};
  m.interface_segments = {{0, 1}};
  return m;
}

double fourier_center(int terms) {
  // -Δu = 1 on the unit square, u = 0 on the boundary, evaluated at the centre.
  double s = 0.0;
  const double pi = std::numbers::pi;
  for (int m = 1; m < terms; m += 2)
    for (int n = 1; n < terms; n += 2) {
      const double sign = (((m - 1) / 2 + (n - 1) / 2) % 2) ? -1.0 : 1.0;
      s += sign * 16.0 / (pi * pi * pi * pi * m * n * (m * m + n * n));
    }
  return s;
}

}  // namespace

TEST_CASE("hat gradients on the unit right triangle") {
  const auto g = hat_gradients({0, 0}, {1, 0}, {0, 1});
  CHECK(g[0] == Vec2{-1, -1});
  CHECK(g[1] == Vec2{1, 0});
  CHECK(g[2] == Vec2{0, 1});
}

TEST_CASE("element stiffness") {
  const MembraneMesh m = single_triangle();
  AssemblyOptions o;
  o.fixed_nodes = std::vector<int>{};
  const DiscreteSystem s = assemble(m, FormSpec{}, LoadSpec{}, o);
  const double want[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(s.K.at(i, j) == doctest::Approx(want[i][j]).epsilon(1e-15));
}

TEST_CASE("constant jump energy") {
  for (double L : {1.0, 0.3}) {
    const MembraneMesh m = membrane_pair(L);
    const std::vector<double> u{1, 1, 0, 0, 1, 0};
    CHECK(energy(m, FormSpec{Conductivity::identity(), 5.0, 0.0}, u) == doctest::Approx(5.0 * L).epsilon(1e-14));
    AssemblyOptions o;
    o.fixed_nodes = std::vector<int>{};
    const DiscreteSystem s = assemble(m, FormSpec{Conductivity::identity(), 5.0, 0.0}, LoadSpec{}, o);
    CHECK(s.K.quadratic_form(u) == doctest::Approx(5.0 * L).epsilon(1e-14));
    CHECK(s.K.symmetry_defect() <= 1e-12);
  }
}

TEST_CASE("zero drift gives zero load") {
  const CellMesh c = build_cell_mesh({}, 0.1);
  const DiscreteSystem s = assemble(c.mesh, FormSpec{Conductivity::anisotropic(), 1.0, 1e-3}, LoadSpec{nullptr, Vec2{0, 0}});
  for (double v : s.load) CHECK(v == 0.0);
}

TEST_CASE("Laplace centre value against the Fourier series") {
  const double oracle = fourier_center(801);
  CHECK(std::abs(oracle - fourier_center(401)) <= 1e-7);
  const MembraneMesh m = build_square_mesh(64);
  const DiscreteSystem s = assemble(m, FormSpec{}, LoadSpec{[](Vec2) { return 1.0; }, std::nullopt});
  const FemSolution u = solve(s);
  const int centre = 32 * 65 + 32;
  CHECK(std::abs(u.values[centre] - oracle) <= 1e-3);
}

TEST_CASE("zero source and linearity") {
  const CellMesh c = build_cell_mesh({}, 0.25);
  const MembraneMesh m = tile_domain_mesh(c, DeformationMap::identity(), 0.25);
  const FormSpec form{Conductivity::identity(), 4.0, 0.0};
  const auto f1 = [](Vec2) { return 1.0; };
  const auto f2 = [](Vec2 x) { return x.x * x.y - 0.3; };
  const auto u0 = solve(assemble(m, form, LoadSpec{[](Vec2) { return 0.0; }, std::nullopt}));
  for (double v : u0.values) CHECK(v == 0.0);
  const auto a = solve(assemble(m, form, LoadSpec{f1, std::nullopt}));
  const auto b = solve(assemble(m, form, LoadSpec{f2, std::nullopt}));
  const auto ab = solve(assemble(m, form, LoadSpec{[&](Vec2 x) { return f1(x) + f2(x); }, std::nullopt}));
  for (std::size_t i = 0; i < ab.values.size(); ++i) CHECK(std::abs(ab.values[i] - a.values[i] - b.values[i]) <= 1e-9);
}

TEST_CASE("norms") {
  const CellMesh c = build_cell_mesh({}, 0.1);
  const MembraneMesh &m = c.mesh;
  const NormRecord k = norms(m, std::vector<double>(m.num_nodes(), 2.5));
  CHECK(k.grad_plus_L2 <= 1e-13);
  CHECK(k.grad_minus_L2 <= 1e-13);
  CHECK(k.jump_L2 == 0.0);
  CHECK(k.u_L2 == doctest::Approx(2.5).epsilon(1e-13));

  std::vector<double> x1(m.num_nodes());
  for (std::size_t i = 0; i < x1.size(); ++i) x1[i] = m.vertices[i].x;
  const NormRecord r = norms(m, x1);
  CHECK(r.grad_plus_L2 == doctest::Approx(std::sqrt(m.region_area(Region::Plus))).epsilon(1e-13));
  CHECK(r.grad_minus_L2 == doctest::Approx(std::sqrt(m.region_area(Region::Minus))).epsilon(1e-13));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(m.num_nodes());
  for (auto &x : v) x = u(rng);
  const NormRecord got = norms(m, v), want = oracle_norms(m, v);
  CHECK(std::abs(got.grad_plus_L2 - want.grad_plus_L2) <= 1e-10);
  CHECK(std::abs(got.grad_minus_L2 - want.grad_minus_L2) <= 1e-10);
  CHECK(std::abs(got.jump_L2 - want.jump_L2) <= 1e-10);
  CHECK(std::abs(got.u_L2 - want.u_L2) <= 1e-10);
}

TEST_CASE("flux pairing") {
  const MembraneMesh s = build_square_mesh(16);
  const auto psi_x = [](Vec2) { return Vec2{1.0, 0.0}; };
  CHECK(flux_pairing(s, Conductivity::identity(), std::vector<double>(s.num_nodes(), 0.0), psi_x) == 0.0);
  std::vector<double> x1(s.num_nodes());
  for (std::size_t i = 0; i < x1.size(); ++i) x1[i] = s.vertices[i].x;
  CHECK(flux_pairing(s, Conductivity::identity(), x1, psi_x) == doctest::Approx(1.0).epsilon(1e-13));

  // Random field, smooth test function: refined six-point quadrature oracle.
  const CellMesh c = build_cell_mesh({}, 0.05);
  const MembraneMesh &m = c.mesh;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(m.num_nodes());
  for (auto &x : v) x = u(rng);
  const auto psi = [](Vec2 x) { return Vec2{std::sin(2.0 * x.x) * std::cos(x.y), std::exp(0.5 * x.x * x.y)}; };
  const Conductivity A = Conductivity::anisotropic();
  double oracle = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto &tr = m.triangles[t];
    const Vec2 a = m.vertices[tr[0]], b = m.vertices[tr[1]], cc = m.vertices[tr[2]];
    const Vec2 centroid_ref = (m.reference[tr[0]] + m.reference[tr[1]] + m.reference[tr[2]]) * (1.0 / 3.0);
    const Vec2 flux = A.at(centroid_ref) * p1_gradient(a, b, cc, v[tr[0]], v[tr[1]], v[tr[2]]);
    const int k = 8;
    const auto node = [&](int i, int j) { return a + (b - a) * (double(i) / k) + (cc - a) * (double(j) / k); };
    const auto add = [&](Vec2 p0, Vec2 p1, Vec2 p2) {
      const double sub = std::abs(tri_area(p0, p1, p2));
      for (const auto &q : kRule6) oracle += sub * q.w * dot(flux, psi(p0 * q.l1 + p1 * q.l2 + p2 * (1.0 - q.l1 - q.l2)));
    };
    for (int i = 0; i < k; ++i)
      for (int j = 0; i + j < k; ++j) {
        add(node(i, j), node(i + 1, j), node(i, j + 1));
        if (i + j + 1 < k) add(node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
      }
  }
  CHECK(std::abs(flux_pairing(m, A, v, psi) - oracle) <= 1e-8);
}

TEST_CASE("assembled matrices are symmetric and coercive") {
  const CellMesh c = build_cell_mesh({}, 0.25);
  const MembraneMesh m = build_truncated_mesh(c, DeformationMap::bernoulli(5), 1);
  const double delta = 1e-3, gamma = 1.0;
  const DiscreteSystem s = assemble(m, FormSpec{Conductivity::anisotropic(), gamma, delta}, LoadSpec{});
  CHECK(s.K.symmetry_defect() <= 1e-12);
  CHECK(s.K_free.symmetry_defect() <= 1e-12);
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g(0.0, 1.0);
  const double c0 = std::min({Conductivity::anisotropic().lambda(), gamma, delta});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> free(s.free_dofs.size());
    for (auto &x : free) x = g(rng);
    const std::vector<double> v = expand_free(s, free);
    const NormRecord n = oracle_norms(m, v);
    const double w2 = n.grad_plus_L2 * n.grad_plus_L2 + n.grad_minus_L2 * n.grad_minus_L2 + n.u_L2 * n.u_L2 +
                      n.jump_L2 * n.jump_L2;
    CHECK(s.K_free.quadratic_form(free) >= c0 * w2 - 1e-9);
  }
}

TEST_CASE("solution CSV") {
  const MembraneMesh m = membrane_pair(1.0);
  std::ostringstream out;
  write_solution_csv(out, m, {1, 2, 3, 4, 5, 6});
  const std::string s = out.str();
  CHECK(s.rfind("node_id,x,y,region,value\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 7);
  CHECK(s.find("minus") != std::string::npos);
}
