#pragma once

// Triangulations with a double-noded interface.
//
// Nodes on a membrane exist twice: one copy is referenced only by PLUS
// triangles and the other only by MINUS triangles. The FE space built on such
// a mesh carries independent traces u+ and u- on every membrane.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mhom/geometry.hpp"
#include "mhom/types.hpp"

namespace mhom {

enum class Region : std::int8_t { Plus = 1, Minus = -1 };

struct MembraneMesh {
  std::vector<Vec2> vertices;
  /// Undeformed coordinates in cell units (k + y_local); equals vertices for
  /// meshes read from disk.
  std::vector<Vec2> reference;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<Region> regions;
  std::vector<CellIndex> triangle_cells;
  /// (plus-side node, minus-side node) with coincident coordinates.
  std::vector<std::array<int, 2>> interface_pairs;
  /// Consecutive interface pairs (a, b); the MINUS region lies to the left of a -> b.
  std::vector<std::array<int, 2>> interface_segments;
  std::vector<int> boundary_nodes;
  double h = 0.0;
  /// Physical length of one cell (epsilon for domain meshes, 1 otherwise).
  double scale = 1.0;

  std::size_t num_nodes() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double triangle_area(std::size_t t) const;
  double region_area(Region r) const;
  double total_area() const;
  /// Region of each node, taken from the triangles that reference it.
  std::vector<Region> node_regions() const;
};

/// Reference unit-cell mesh plus the bookkeeping needed to tile it.
struct CellMesh {
  MembraneMesh mesh;
  InterfaceSpec spec;
  int interface_nodes = 0;  // N, a multiple of 8
  int side_segments = 0;    // segments per side of the unit square
  /// Node ids on bottom, right, top, left, ordered by increasing coordinate,
  /// corners included.
  std::array<std::vector<int>, 4> sides;
};

/// Number of interface nodes for a target edge length: ceil(2 pi r / h)
/// rounded up to a multiple of 8 (so both symmetry axes and diagonals carry
/// vertices).
int interface_node_count(double radius, double h);

/// Conforming D4-symmetric mesh of the unit cell with the circle as mesh edges.
/// Throws MeshQualityFailure for h > 0.25 or a minimum angle below 20 degrees.
CellMesh build_cell_mesh(const InterfaceSpec &spec, double h);

enum class MembraneRule { Distance, All, None };
std::string to_string(MembraneRule rule);

/// Tiles cells lo .. lo + (nx-1, ny-1), deforms them vertex-wise with
/// map.apply_in_cell and scales by `scale`. Cells with has_membrane(k) false
/// keep their triangles but have MINUS tags and duplicated nodes merged.
MembraneMesh tile_cells(const CellMesh &cell, const DeformationMap &map, CellIndex lo, int nx, int ny,
                        double scale, const std::function<bool(CellIndex)> &has_membrane);

/// Mesh of D = (0,1)^2 for the epsilon-problem; 1/eps must be an integer.
MembraneMesh tile_domain_mesh(const CellMesh &cell, const DeformationMap &map, double eps,
                              MembraneRule rule = MembraneRule::Distance);

/// Membrane-carrying cells of D/eps under the reference-distance rule.
bool cell_keeps_membrane(CellIndex k, int cells_per_side, double margin);

/// Mesh of Phi(offset + Q_n), Q_n = (-n, n)^2, every cell carrying a membrane
/// unless `membranes` is false. Outer boundary nodes are the Dirichlet set.
MembraneMesh build_truncated_mesh(const CellMesh &cell, const DeformationMap &map, int n,
                                  CellIndex offset = {}, bool membranes = true);

/// Structured P1 mesh of (0,1)^2 without membranes. Squares of the n x n grid
/// are split along the diagonal pointing at the centre (union jack), so the
/// mesh is invariant under the symmetries of the square. Node (i,j) has id j*(n+1)+i.
MembraneMesh build_square_mesh(int n);

/// True when square (i, j) of build_square_mesh(n) is split along (i,j)-(i+1,j+1).
inline bool square_main_diagonal(int n, int i, int j) { return (2 * i + 1 < n) == (2 * j + 1 < n); }

struct MeshReport {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;
  bool conforming = false;
  bool oriented = false;
  bool normals_consistent = false;
  double pairing_residual = 0.0;
  std::vector<std::string> issues;

  bool ok(double min_angle = 20.0) const {
    return conforming && oriented && normals_consistent && pairing_residual <= 1e-12 &&
           min_angle_deg >= min_angle;
  }
};

/// Pure diagnostic; throws MeshQualityFailure only for an empty mesh.
MeshReport mesh_report(const MembraneMesh &mesh);

/// Plain-text export ("membrane-mesh v1").
void write_mesh(std::ostream &out, const MembraneMesh &mesh);
MembraneMesh read_mesh(std::istream &in);
void write_mesh_file(const std::string &path, const MembraneMesh &mesh);
MembraneMesh read_mesh_file(const std::string &path);

}  // namespace mhom
