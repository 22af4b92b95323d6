#include "mhom/fem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "mhom/errors.hpp"
#include "mhom/output.hpp"
#include "mhom/quadrature.hpp"

namespace mhom {

std::array<Vec2, 3> hat_gradients(Vec2 a, Vec2 b, Vec2 c) {
  const double area2 = cross(b - a, c - a);
  // grad of the hat at a vertex is the rotated opposite edge over twice the area.
  const auto g = [area2](Vec2 from, Vec2 to) { return Vec2{-(to.y - from.y) / area2, (to.x - from.x) / area2}; };
  return {g(b, c), g(c, a), g(a, b)};
}

Mat2 triangle_conductivity(const MembraneMesh &mesh, const Conductivity &A, std::size_t t) {
  const auto &tri = mesh.triangles[t];
  const auto &ref = mesh.reference.empty() ? mesh.vertices : mesh.reference;
  const Vec2 c = (1.0 / 3.0) * (ref[tri[0]] + ref[tri[1]] + ref[tri[2]]);
  return A.at(c);
}

namespace {

std::vector<int> resolve_dofs(const MembraneMesh &mesh, const std::vector<int> &node_to_dof, std::size_t &ndof) {
  if (node_to_dof.empty()) {
    std::vector<int> id(mesh.num_nodes());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
    ndof = id.size();
    return id;
  }
  if (node_to_dof.size() != mesh.num_nodes()) throw std::invalid_argument("assemble: node_to_dof has wrong size");
  int top = -1;
  for (int d : node_to_dof) {
    if (d < 0) throw std::invalid_argument("assemble: negative dof index");
    top = std::max(top, d);
  }
  ndof = static_cast<std::size_t>(top + 1);
  return node_to_dof;
}

}  // namespace

DiscreteSystem assemble(const MembraneMesh &mesh, const FormSpec &form, const LoadSpec &load,
                        const AssemblyOptions &opts) {
  if (form.gamma < 0.0 || form.delta < 0.0) throw std::invalid_argument("assemble: gamma and delta must be >= 0");
  DiscreteSystem sys;
  sys.mesh = &mesh;
  sys.form = form;
  sys.node_to_dof = resolve_dofs(mesh, opts.node_to_dof, sys.num_dofs);
  const auto &dof = sys.node_to_dof;
  const auto &v = mesh.vertices;

  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.num_triangles() + 16 * mesh.interface_segments.size());
  sys.load.assign(sys.num_dofs, 0.0);
  const auto &rule = quad::triangle7();

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles[t];
    const Vec2 a = v[tri[0]], b = v[tri[1]], c = v[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    if (!(area > 0.0)) throw MeshQualityFailure("assemble: triangle with non-positive area");
    const auto G = hat_gradients(a, b, c);
    const Mat2 At = triangle_conductivity(mesh, form.A, t);
    check_elliptic(At, form.A.lambda(), form.A.Lambda());

    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double kij = area * dot(G[i], At * G[j]);
        if (form.delta > 0.0) kij += form.delta * area / 12.0 * (i == j ? 2.0 : 1.0);
        trip.push_back({dof[tri[i]], dof[tri[j]], kij});
      }
    }
    if (load.p) {
      const Vec2 Ap = At * *load.p;
      for (int i = 0; i < 3; ++i) sys.load[dof[tri[i]]] -= area * dot(Ap, G[i]);
    }
    if (load.f) {
      for (const auto &q : rule) {
        const double fq = q.w * area * load.f(quad::at(q, a, b, c));
        sys.load[dof[tri[0]]] += fq * q.l1;
        sys.load[dof[tri[1]]] += fq * q.l2;
        sys.load[dof[tri[2]]] += fq * q.l3;
      }
    }
  }

  if (form.gamma > 0.0) {
    for (const auto &seg : mesh.interface_segments) {
      const auto &pa = mesh.interface_pairs[seg[0]];
      const auto &pb = mesh.interface_pairs[seg[1]];
      const double L = norm(v[pb[0]] - v[pa[0]]);
      const std::array<int, 4> d{dof[pa[0]], dof[pb[0]], dof[pa[1]], dof[pb[1]]};
      const std::array<double, 4> sign{1.0, 1.0, -1.0, -1.0};
      const std::array<int, 4> node{0, 1, 0, 1};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          trip.push_back({d[i], d[j], form.gamma * L / 6.0 * (node[i] == node[j] ? 2.0 : 1.0) * sign[i] * sign[j]});
    }
  }

  sys.K = CsrMatrix::from_triplets(sys.num_dofs, sys.num_dofs, trip);

  sys.fixed.assign(sys.num_dofs, 0);
  const std::vector<int> &fixed_nodes = opts.fixed_nodes ? *opts.fixed_nodes : mesh.boundary_nodes;
  for (int n : fixed_nodes) {
    if (n < 0 || static_cast<std::size_t>(n) >= mesh.num_nodes()) throw std::out_of_range("assemble: fixed node out of range");
    sys.fixed[dof[n]] = 1;
  }
  sys.free_index.assign(sys.num_dofs, -1);
  for (std::size_t d = 0; d < sys.num_dofs; ++d)
    if (!sys.fixed[d]) {
      sys.free_index[d] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(static_cast<int>(d));
    }

  // Symmetric elimination of zero Dirichlet values: keep the free block.
  CsrMatrix &Kf = sys.K_free;
  Kf.rows = Kf.cols = sys.free_dofs.size();
  Kf.row_ptr.assign(Kf.rows + 1, 0);
  for (std::size_t r = 0; r < Kf.rows; ++r) {
    const int d = sys.free_dofs[r];
    for (int k = sys.K.row_ptr[d]; k < sys.K.row_ptr[d + 1]; ++k) {
      const int c = sys.free_index[sys.K.col[k]];
      if (c < 0) continue;
      Kf.col.push_back(c);
      Kf.val.push_back(sys.K.val[k]);
    }
    Kf.row_ptr[r + 1] = static_cast<int>(Kf.col.size());
  }
  sys.load_free.resize(Kf.rows);
  for (std::size_t r = 0; r < Kf.rows; ++r) sys.load_free[r] = sys.load[sys.free_dofs[r]];
  return sys;
}

std::vector<double> expand_free(const DiscreteSystem &sys, const std::vector<double> &free_values) {
  if (free_values.size() != sys.free_dofs.size()) throw std::invalid_argument("expand_free: size mismatch");
  std::vector<double> out(sys.node_to_dof.size(), 0.0);
  for (std::size_t n = 0; n < out.size(); ++n) {
    const int f = sys.free_index[sys.node_to_dof[n]];
    if (f >= 0) out[n] = free_values[f];
  }
  return out;
}

FemSolution solve(const DiscreteSystem &sys, const CgOptions &opts) {
  const CgResult cg = pcg(sys.K_free, sys.load_free, opts);
  FemSolution sol;
  sol.mesh = sys.mesh;
  sol.values = expand_free(sys, cg.x);
  sol.iterations = cg.iterations;
  sol.rel_residual = cg.rel_residual;
  return sol;
}

NormRecord norms(const MembraneMesh &mesh, const std::vector<double> &u) {
  if (u.size() != mesh.num_nodes()) throw std::invalid_argument("norms: value array has wrong size");
  const auto &v = mesh.vertices;
  NormRecord rec;
  double gp = 0.0, gm = 0.0, jump = 0.0, l2 = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles[t];
    const Vec2 a = v[tri[0]], b = v[tri[1]], c = v[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    const auto G = hat_gradients(a, b, c);
    const Vec2 grad = u[tri[0]] * G[0] + u[tri[1]] * G[1] + u[tri[2]] * G[2];
    (mesh.regions[t] == Region::Plus ? gp : gm) += area * dot(grad, grad);
    const double s = u[tri[0]] + u[tri[1]] + u[tri[2]];
    const double sq = u[tri[0]] * u[tri[0]] + u[tri[1]] * u[tri[1]] + u[tri[2]] * u[tri[2]];
    l2 += area / 12.0 * (sq + s * s);
  }
  for (const auto &seg : mesh.interface_segments) {
    const auto &pa = mesh.interface_pairs[seg[0]];
    const auto &pb = mesh.interface_pairs[seg[1]];
    const double L = norm(v[pb[0]] - v[pa[0]]);
    const double ja = u[pa[0]] - u[pa[1]], jb = u[pb[0]] - u[pb[1]];
    jump += L / 3.0 * (ja * ja + ja * jb + jb * jb);
  }
  rec.grad_plus_L2 = std::sqrt(gp);
  rec.grad_minus_L2 = std::sqrt(gm);
  rec.jump_L2 = std::sqrt(jump);
  rec.u_L2 = std::sqrt(l2);
  return rec;
}

double energy(const MembraneMesh &mesh, const FormSpec &form, const std::vector<double> &u) {
  if (u.size() != mesh.num_nodes()) throw std::invalid_argument("energy: value array has wrong size");
  const auto &v = mesh.vertices;
  double e = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles[t];
    const Vec2 a = v[tri[0]], b = v[tri[1]], c = v[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    const auto G = hat_gradients(a, b, c);
    const Vec2 grad = u[tri[0]] * G[0] + u[tri[1]] * G[1] + u[tri[2]] * G[2];
    e += area * dot(grad, triangle_conductivity(mesh, form.A, t) * grad);
    if (form.delta > 0.0) {
      const double s = u[tri[0]] + u[tri[1]] + u[tri[2]];
      const double sq = u[tri[0]] * u[tri[0]] + u[tri[1]] * u[tri[1]] + u[tri[2]] * u[tri[2]];
      e += form.delta * area / 12.0 * (sq + s * s);
    }
  }
  if (form.gamma > 0.0) {
    const double j = norms(mesh, u).jump_L2;
    e += form.gamma * j * j;
  }
  return e;
}

double flux_pairing(const MembraneMesh &mesh, const Conductivity &A, const std::vector<double> &u,
                    const std::function<Vec2(Vec2)> &psi) {
  if (u.size() != mesh.num_nodes()) throw std::invalid_argument("flux_pairing: value array has wrong size");
  const auto &v = mesh.vertices;
  const auto &rule = quad::triangle7();
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles[t];
    const Vec2 a = v[tri[0]], b = v[tri[1]], c = v[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    const auto G = hat_gradients(a, b, c);
    const Vec2 flux = triangle_conductivity(mesh, A, t) * (u[tri[0]] * G[0] + u[tri[1]] * G[1] + u[tri[2]] * G[2]);
    double local = 0.0;
    for (const auto &q : rule) local += q.w * dot(flux, psi(quad::at(q, a, b, c)));
    sum += area * local;
  }
  return sum;
}

void write_solution_csv(std::ostream &out, const MembraneMesh &mesh, const std::vector<double> &values) {
  const auto regions = mesh.node_regions();
  out << "node_id,x,y,region,value\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    out << i << ',' << format_double(mesh.vertices[i].x) << ',' << format_double(mesh.vertices[i].y) << ','
        << (regions[i] == Region::Plus ? "plus" : "minus") << ',' << format_double(values[i]) << '\n';
}

}  // namespace mhom
