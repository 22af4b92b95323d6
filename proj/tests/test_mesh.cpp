#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "mhom/effective.hpp"
#include "mhom/errors.hpp"
#include "mhom/mesh.hpp"
#include "mhom/pipeline.hpp"

using namespace mhom;

namespace {

std::size_t distinct_positions(const MembraneMesh &m) {
  std::set<std::pair<long long, long long>> seen;
  for (const auto &v : m.vertices) seen.insert({std::llround(v.x * 1e9), std::llround(v.y * 1e9)});
  return seen.size();
}

int membrane_count(int cells_per_side, double margin) {
  int count = 0;
  for (int i = 0; i < cells_per_side; ++i)
    for (int j = 0; j < cells_per_side; ++j) {
      // Distance from the reference cell [i, i+1] x [j, j+1] to the boundary of [0, n]^2.
      const double d = std::min({double(i), double(j), cells_per_side - i - 1.0, cells_per_side - j - 1.0});
      count += d >= margin;
    }
  return count;
}

}  // namespace

TEST_CASE("interface node count") {
  CHECK(interface_node_count(0.25, 0.1) == 16);
  CHECK(interface_node_count(0.25, 0.05) == 32);
  CHECK(interface_node_count(0.25, 0.25) == 8);
  for (double h : {0.2, 0.07, 0.03}) CHECK(interface_node_count(0.25, h) % 8 == 0);
}

TEST_CASE("cell meshes pass the checker") {
  for (double h : {0.25, 0.1, 0.05}) {
    const CellMesh c = build_cell_mesh({}, h);
    const MeshReport r = mesh_report(c.mesh);
    INFO("h = " << h);
    CHECK(r.ok());
    CHECK(c.mesh.total_area() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(static_cast<int>(c.mesh.interface_pairs.size()) == c.interface_nodes);
  }
  CHECK_THROWS_AS(build_cell_mesh({}, 0.3), MeshQualityFailure);
}

TEST_CASE("MINUS area approaches the disk area") {
  const double disk = std::numbers::pi / 16.0;
  const double e1 = std::abs(build_cell_mesh({}, 0.1).mesh.region_area(Region::Minus) - disk);
  const double e2 = std::abs(build_cell_mesh({}, 0.05).mesh.region_area(Region::Minus) - disk);
  CHECK(e2 < 2e-3);
  // Inscribed polygon: error ~ N^-2.
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("deformed MINUS area converges to the determinant integral") {
  const auto bump = DeformationMap::bump({});
  const double exact = cell_volumes(bump.bump_params(), 1).second;
  const double e1 = std::abs(discrete_theta(build_cell_mesh({}, 0.1), bump) - exact);
  const double e2 = std::abs(discrete_theta(build_cell_mesh({}, 0.05), bump) - exact);
  const double e3 = std::abs(discrete_theta(build_cell_mesh({}, 0.025), bump) - exact);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
  CHECK(e1 / e3 > 10.0);
}

TEST_CASE("membrane-carrying cells under the distance rule") {
  CHECK(membrane_count(4, 0.25) == 4);
  CHECK(membrane_count(2, 0.25) == 0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(cell_keeps_membrane({i, j}, 4, 0.25) == (i >= 1 && i <= 2 && j >= 1 && j <= 2));

  const CellMesh cell = build_cell_mesh({}, 0.1);
  const MembraneMesh d4 = tile_domain_mesh(cell, DeformationMap::identity(), 0.25);
  CHECK(d4.interface_pairs.size() == 4u * cell.interface_nodes);
  CHECK(d4.total_area() == doctest::Approx(1.0).epsilon(1e-12));
  // Every node is a distinct position except MINUS copies on the 4 membranes.
  CHECK(d4.num_nodes() == distinct_positions(d4) + 4u * cell.interface_nodes);
  CHECK(mesh_report(d4).ok());

  const MembraneMesh d2 = tile_domain_mesh(cell, DeformationMap::identity(), 0.5);
  CHECK(d2.interface_pairs.empty());
  CHECK(d2.num_nodes() == distinct_positions(d2));
  CHECK(d2.region_area(Region::Minus) == 0.0);

  const MembraneMesh d8 = tile_domain_mesh(cell, DeformationMap::identity(), 0.125);
  CHECK(d8.interface_pairs.size() == static_cast<std::size_t>(membrane_count(8, 0.25)) * cell.interface_nodes);
}

TEST_CASE("MINUS fraction of the membrane cells") {
  const CellMesh cell = build_cell_mesh({}, 0.05);
  const MembraneMesh d = tile_domain_mesh(cell, DeformationMap::identity(), 0.125);
  const double cells = membrane_count(8, 0.25);
  const double fraction = d.region_area(Region::Minus) / (cells * 0.125 * 0.125);
  CHECK(std::abs(fraction - std::numbers::pi / 16.0) <= 2e-3);
}

TEST_CASE("truncated meshes") {
  const CellMesh cell = build_cell_mesh({}, 0.1);
  const MembraneMesh q1 = build_truncated_mesh(cell, DeformationMap::identity(), 1);
  CHECK(q1.total_area() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(q1.interface_pairs.size() == 4u * cell.interface_nodes);

  const MembraneMesh q4 = build_truncated_mesh(cell, DeformationMap::identity(), 4);
  CHECK(std::abs(q4.total_area() - 64.0) <= 1e-10);
  CHECK(mesh_report(q4).ok());

  // Two seeds: triangles move only in cells whose bits differ.
  const auto a = DeformationMap::bernoulli(11), b = DeformationMap::bernoulli(12);
  const MembraneMesh ma = build_truncated_mesh(cell, a, 4), mb = build_truncated_mesh(cell, b, 4);
  REQUIRE(ma.num_triangles() == mb.num_triangles());
  int differing_cells = 0;
  for (std::size_t t = 0; t < ma.num_triangles(); ++t) {
    const CellIndex k = ma.triangle_cells[t];
    double diff = 0.0;
    for (int i = 0; i < 3; ++i) diff = std::max(diff, norm(ma.vertices[ma.triangles[t][i]] - mb.vertices[mb.triangles[t][i]]));
    if (a.cell_bit(k) == b.cell_bit(k)) {
      CHECK(diff == 0.0);
    } else if (diff > 0.0) {
      ++differing_cells;
    }
  }
  CHECK(differing_cells > 0);
  CHECK(mesh_report(ma).ok());
}

TEST_CASE("mesh checker flags faults") {
  CellMesh c = build_cell_mesh({}, 0.1);
  const int minus_node = c.mesh.interface_pairs[3][1];
  c.mesh.vertices[minus_node] = c.mesh.vertices[minus_node] + Vec2{1e-6, 0.0};
  const MeshReport r = mesh_report(c.mesh);
  CHECK_FALSE(r.ok());
  CHECK(r.pairing_residual > 1e-7);
  CHECK_THROWS_AS(mesh_report(MembraneMesh{}), MeshQualityFailure);
}

TEST_CASE("mesh text round trip") {
  const CellMesh cell = build_cell_mesh({}, 0.1);
  const MembraneMesh m = tile_domain_mesh(cell, DeformationMap::bernoulli(3), 0.25);
  std::ostringstream a;
  write_mesh(a, m);
  std::istringstream in(a.str());
  const MembraneMesh back = read_mesh(in);
  std::ostringstream b;
  write_mesh(b, back);
  CHECK(a.str() == b.str());
  CHECK(back.interface_segments.size() == m.interface_segments.size());
  CHECK(back.num_triangles() == m.num_triangles());
}

TEST_CASE("union jack square mesh is symmetric") {
  const MembraneMesh s = build_square_mesh(8);
  CHECK(s.total_area() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mesh_report(s).ok(40.0));
  // Reflecting x1 -> 1 - x1 maps the triangle set to itself.
  std::set<std::array<long long, 6>> tris;
  const auto key = [](Vec2 a, Vec2 b, Vec2 c) {
    std::array<std::pair<long long, long long>, 3> p{{{std::llround(a.x * 8), std::llround(a.y * 8)},
                                                       {std::llround(b.x * 8), std::llround(b.y * 8)},
                                                       {std::llround(c.x * 8), std::llround(c.y * 8)}}};
    std::sort(p.begin(), p.end());
    return std::array<long long, 6>{p[0].first, p[0].second, p[1].first, p[1].second, p[2].first, p[2].second};
  };
  for (const auto &t : s.triangles) tris.insert(key(s.vertices[t[0]], s.vertices[t[1]], s.vertices[t[2]]));
  for (const auto &t : s.triangles) {
    const auto r = [&](int i) { return Vec2{1.0 - s.vertices[t[i]].x, s.vertices[t[i]].y}; };
    CHECK(tris.count(key(r(0), r(1), r(2))) == 1);
  }
}
