#pragma once

// P1 finite elements for the membrane transmission form
//
//   a(u, v) = sum over regions of ∫ A ∇u·∇v + δ ∫ u v + γ ∫_Γ (u+ − u−)(v+ − v−)
//
// on a double-noded mesh. A is taken constant per triangle, evaluated at the
// reference centroid. The jump term uses the exact edge mass matrix, which
// equals two-point Gauss on each straight deformed edge.

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mhom/conductivity.hpp"
#include "mhom/mesh.hpp"
#include "mhom/sparse.hpp"

namespace mhom {

struct FormSpec {
  Conductivity A = Conductivity::identity();
  double gamma = 0.0;
  double delta = 0.0;
};

/// Right-hand side: ∫ f v and/or −∫ A p·∇v. f takes physical coordinates.
struct LoadSpec {
  std::function<double(Vec2)> f;
  std::optional<Vec2> p;
};

struct AssemblyOptions {
  /// Node -> dof map for identified nodes (periodic cells). Identity if empty.
  std::vector<int> node_to_dof;
  /// Constrained nodes (value 0). Defaults to mesh.boundary_nodes.
  std::optional<std::vector<int>> fixed_nodes;
};

struct DiscreteSystem {
  const MembraneMesh *mesh = nullptr;
  FormSpec form;
  std::vector<int> node_to_dof;
  std::size_t num_dofs = 0;
  /// Full matrix and load over all dofs, before elimination.
  CsrMatrix K;
  std::vector<double> load;
  std::vector<char> fixed;       // per dof
  std::vector<int> free_index;   // per dof, -1 when fixed
  std::vector<int> free_dofs;
  CsrMatrix K_free;
  std::vector<double> load_free;
};

/// Per-triangle gradients of the P1 hat functions at the given vertices.
std::array<Vec2, 3> hat_gradients(Vec2 a, Vec2 b, Vec2 c);

DiscreteSystem assemble(const MembraneMesh &mesh, const FormSpec &form, const LoadSpec &load,
                        const AssemblyOptions &opts = {});

struct FemSolution {
  const MembraneMesh *mesh = nullptr;
  /// One value per mesh node (both copies of an interface pair present).
  std::vector<double> values;
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Jacobi-PCG on the free dofs; fixed dofs are zero.
FemSolution solve(const DiscreteSystem &sys, const CgOptions &opts = {});

/// Expands a free-dof vector into per-node values.
std::vector<double> expand_free(const DiscreteSystem &sys, const std::vector<double> &free_values);

struct NormRecord {
  double grad_plus_L2 = 0.0;
  double grad_minus_L2 = 0.0;
  double jump_L2 = 0.0;
  double u_L2 = 0.0;
};

/// Quadrature norms of a nodal field (exact for P1).
NormRecord norms(const MembraneMesh &mesh, const std::vector<double> &values);

/// a(u, u) evaluated element by element.
double energy(const MembraneMesh &mesh, const FormSpec &form, const std::vector<double> &values);

/// ∫ (χ+ A∇u+ + χ− A∇u−)·ψ with a degree-5 rule per triangle.
double flux_pairing(const MembraneMesh &mesh, const Conductivity &A, const std::vector<double> &values,
                    const std::function<Vec2(Vec2)> &psi);

/// Triangle-wise A at the reference centroid.
Mat2 triangle_conductivity(const MembraneMesh &mesh, const Conductivity &A, std::size_t t);

/// CSV with header node_id,x,y,region,value.
void write_solution_csv(std::ostream &out, const MembraneMesh &mesh, const std::vector<double> &values);

}  // namespace mhom
