#include "mhom/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mhom/errors.hpp"

namespace mhom {

void CorrectorConfig::validate() const {
  if (!(delta > 0.0) || delta > 1.0) throw std::invalid_argument("corrector: delta must lie in (0, 1]");
  if (n < 1) throw std::invalid_argument("corrector: n must be at least 1");
  if (m < 1 || m > n - 1) throw std::invalid_argument("corrector: m must satisfy 1 <= m <= n-1");
  if (!(h > 0.0)) throw std::invalid_argument("corrector: h must be positive");
}

namespace {

// -∫ A p·∇φ_i over all triangles, per dof.
std::vector<double> corrector_load(const MembraneMesh &mesh, const Conductivity &A, Vec2 p,
                                   const std::vector<int> &dof, std::size_t ndof) {
  std::vector<double> b(ndof, 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]], bb = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const double area = 0.5 * cross(bb - a, c - a);
    const auto G = hat_gradients(a, bb, c);
    const Vec2 Ap = triangle_conductivity(mesh, A, t) * p;
    for (int i = 0; i < 3; ++i) b[dof[tri[i]]] -= area * dot(Ap, G[i]);
  }
  return b;
}

std::vector<double> restrict_free(const DiscreteSystem &sys, const std::vector<double> &full) {
  std::vector<double> out(sys.free_dofs.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = full[sys.free_dofs[i]];
  return out;
}

Vec2 tri_gradient(const std::vector<Vec2> &pts, const std::array<int, 3> &tri, const std::vector<double> &u,
                  double &area) {
  const Vec2 a = pts[tri[0]], b = pts[tri[1]], c = pts[tri[2]];
  area = 0.5 * cross(b - a, c - a);
  const auto G = hat_gradients(a, b, c);
  return u[tri[0]] * G[0] + u[tri[1]] * G[1] + u[tri[2]] * G[2];
}

}  // namespace

const CellRecord &CorrectorSolution::cell(CellIndex k) const {
  const int side = 2 * n;
  const int i = k.x - (offset.x - n), j = k.y - (offset.y - n);
  if (i < 0 || j < 0 || i >= side || j >= side) throw std::out_of_range("CorrectorSolution::cell: outside Q_n");
  return cells[static_cast<std::size_t>(j) * side + i];
}

std::pair<Vec2, Vec2> CorrectorSolution::window_flux(int m) const {
  if (m < 1 || m > n) throw std::invalid_argument("window_flux: m must lie in [1, n]");
  Vec2 plus, minus;
  for (int j = -m; j < m; ++j)
    for (int i = -m; i < m; ++i) {
      const CellRecord &c = cell({offset.x + i, offset.y + j});
      plus += c.flux_plus;
      minus += c.flux_minus;
    }
  const double inv = 1.0 / (4.0 * m * m);
  return {inv * plus, inv * minus};
}

double CorrectorSolution::max_abs() const {
  double worst = 0.0;
  for (double x : fem.values) worst = std::max(worst, std::fabs(x));
  return worst;
}

TruncatedProblem::TruncatedProblem(const CellMesh &cell, const DeformationMap &map, const Conductivity &A, int n,
                                   double delta, CellIndex offset, bool membranes)
    : map_(map), A_(A), n_(n), delta_(delta), offset_(offset) {
  if (!(delta >= 0.0)) throw std::invalid_argument("TruncatedProblem: delta must be >= 0");
  mesh_ = build_truncated_mesh(cell, map, n, offset, membranes);
  sys_ = assemble(mesh_, FormSpec{A, 1.0, delta}, LoadSpec{});
  sys_.mesh = &mesh_;
  load_e1_ = restrict_free(sys_, corrector_load(mesh_, A, {1.0, 0.0}, sys_.node_to_dof, sys_.num_dofs));
  load_e2_ = restrict_free(sys_, corrector_load(mesh_, A, {0.0, 1.0}, sys_.node_to_dof, sys_.num_dofs));
}

CorrectorSolution TruncatedProblem::solve(Vec2 p, const CgOptions &opts) const {
  std::vector<double> b(load_e1_.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = p.x * load_e1_[i] + p.y * load_e2_[i];
  const CgResult cg = pcg(sys_.K_free, b, opts);

  CorrectorSolution sol;
  sol.p = p;
  sol.delta = delta_;
  sol.n = n_;
  sol.offset = offset_;
  sol.fem.mesh = &mesh_;
  sol.fem.values = expand_free(sys_, cg.x);
  sol.fem.iterations = cg.iterations;
  sol.fem.rel_residual = cg.rel_residual;

  const int side = 2 * n_;
  const CellIndex lo{offset_.x - n_, offset_.y - n_};
  sol.cells.resize(static_cast<std::size_t>(side) * side);
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i) sol.cells[static_cast<std::size_t>(j) * side + i].k = {lo.x + i, lo.y + j};
  const auto index_of = [&](CellIndex k) { return static_cast<std::size_t>(k.y - lo.y) * side + (k.x - lo.x); };

  const auto &u = sol.fem.values;
  for (std::size_t t = 0; t < mesh_.num_triangles(); ++t) {
    const auto &tri = mesh_.triangles[t];
    CellRecord &rec = sol.cells[index_of(mesh_.triangle_cells[t])];
    double area = 0.0, area_ref = 0.0;
    const Vec2 g = tri_gradient(mesh_.vertices, tri, u, area);
    const Vec2 flux = area * (triangle_conductivity(mesh_, A_, t) * (p + g));
    (mesh_.regions[t] == Region::Plus ? rec.flux_plus : rec.flux_minus) += flux;

    const Vec2 gr = tri_gradient(mesh_.reference, tri, u, area_ref);
    const double s = u[tri[0]] + u[tri[1]] + u[tri[2]];
    const double sq = u[tri[0]] * u[tri[0]] + u[tri[1]] * u[tri[1]] + u[tri[2]] * u[tri[2]];
    rec.energy_ref += area_ref * dot(gr, gr) + delta_ * area_ref / 12.0 * (sq + s * s);
  }
  for (const auto &seg : mesh_.interface_segments) {
    const auto &pa = mesh_.interface_pairs[seg[0]];
    const auto &pb = mesh_.interface_pairs[seg[1]];
    const double ja = u[pa[0]] - u[pa[1]], jb = u[pb[0]] - u[pb[1]];
    const double q = (ja * ja + ja * jb + jb * jb) / 3.0;
    const Vec2 ra = mesh_.reference[pa[0]], rb = mesh_.reference[pb[0]];
    const Vec2 mid = 0.5 * (ra + rb);
    CellRecord &rec = sol.cells[index_of({static_cast<int>(std::floor(mid.x)), static_cast<int>(std::floor(mid.y))})];
    rec.energy_ref += norm(rb - ra) * q;
    rec.jump_sq += norm(mesh_.vertices[pb[0]] - mesh_.vertices[pa[0]]) * q;
  }
  return sol;
}

CorrectorSolution solve_truncated(const CorrectorConfig &cfg, const DeformationMap &map, const Conductivity &A,
                                  const InterfaceSpec &spec) {
  cfg.validate();
  const CellMesh cell = build_cell_mesh(spec, cfg.h);
  const TruncatedProblem problem(cell, map.with_seed(cfg.seed), A, cfg.n, cfg.delta);
  CorrectorSolution sol = problem.solve(cfg.p);
  sol.fem.mesh = nullptr;  // the problem (and its mesh) goes out of scope here
  return sol;
}

std::vector<double> energy_profile(const CorrectorSolution &sol) {
  std::vector<double> out(sol.n, 0.0);
  for (int k = 1; k <= sol.n; ++k) {
    double e = 0.0;
    for (int j = -k; j < k; ++j)
      for (int i = -k; i < k; ++i) e += sol.cell({sol.offset.x + i, sol.offset.y + j}).energy_ref;
    out[k - 1] = e;
  }
  return out;
}

std::vector<double> sublinearity_diagnostic(const std::vector<CorrectorSolution> &sols) {
  std::vector<double> out;
  out.reserve(sols.size());
  for (const auto &s : sols) out.push_back(s.max_abs() / s.n);
  return out;
}

std::vector<int> periodic_dof_map(const CellMesh &cell) {
  const std::size_t nn = cell.mesh.num_nodes();
  std::vector<int> parent(nn);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  const auto &s = cell.sides;
  for (std::size_t i = 0; i < s[0].size(); ++i) unite(s[0][i], s[2][i]);
  for (std::size_t i = 0; i < s[1].size(); ++i) unite(s[3][i], s[1][i]);

  std::vector<int> dof(nn, -1), root_dof(nn, -1);
  int next = 0;
  for (std::size_t i = 0; i < nn; ++i) {
    const int r = find(static_cast<int>(i));
    if (root_dof[r] < 0) root_dof[r] = next++;
    dof[i] = root_dof[r];
  }
  return dof;
}

PeriodicSolution periodic_cell_solve(Vec2 p, const CellMesh &cell, const Conductivity &A, const CgOptions &opts) {
  PeriodicSolution out;
  out.p = p;
  out.mesh = cell.mesh;
  out.node_to_dof = periodic_dof_map(cell);
  AssemblyOptions ao;
  ao.node_to_dof = out.node_to_dof;
  ao.fixed_nodes = std::vector<int>{cell.sides[0][0]};  // a corner, always PLUS
  const DiscreteSystem sys = assemble(out.mesh, FormSpec{A, 1.0, 0.0}, LoadSpec{nullptr, p}, ao);
  out.fem = solve(sys, opts);
  out.fem.mesh = nullptr;  // out.mesh moves with the returned value

  auto &u = out.fem.values;
  double plus_area = 0.0, plus_int = 0.0;
  for (std::size_t t = 0; t < out.mesh.num_triangles(); ++t) {
    if (out.mesh.regions[t] != Region::Plus) continue;
    const auto &tri = out.mesh.triangles[t];
    const double area = out.mesh.triangle_area(t);
    plus_area += area;
    plus_int += area * (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
  }
  const double shift = plus_int / plus_area;
  for (double &x : u) x -= shift;
  plus_int = 0.0;
  for (std::size_t t = 0; t < out.mesh.num_triangles(); ++t) {
    const auto &tri = out.mesh.triangles[t];
    double area = 0.0;
    const Vec2 g = tri_gradient(out.mesh.vertices, tri, u, area);
    const Vec2 flux = area * (triangle_conductivity(out.mesh, A, t) * (p + g));
    if (out.mesh.regions[t] == Region::Plus) {
      out.flux_plus += flux;
      plus_int += area * (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
    } else {
      out.flux_minus += flux;
    }
  }
  out.plus_mean = plus_int / plus_area;
  const double j = norms(out.mesh, u).jump_L2;
  out.jump_sq = j * j;
  return out;
}

PeriodicSolution periodic_cell_solve(Vec2 p, const InterfaceSpec &spec, const Conductivity &A, double h) {
  return periodic_cell_solve(p, build_cell_mesh(spec, h), A);
}

Mat2 periodic_tensor(const CellMesh &cell, const Conductivity &A) {
  const Vec2 c1 = periodic_cell_solve({1.0, 0.0}, cell, A).flux();
  const Vec2 c2 = periodic_cell_solve({0.0, 1.0}, cell, A).flux();
  // a_ij = e_j · flux(e_i): row i holds flux(e_i).
  return {c1.x, c1.y, c2.x, c2.y};
}

RichardsonResult richardson(const std::vector<double> &levels) {
  if (levels.size() < 2) throw std::invalid_argument("richardson: need at least two levels");
  RichardsonResult r;
  r.levels = levels;
  const std::size_t n = levels.size();
  const double a1 = levels[n - 2], a2 = levels[n - 1];
  r.order = 2.0;
  if (n >= 3) {
    const double d0 = levels[n - 3] - a1, d1 = a1 - a2;
    if (d0 != 0.0 && d1 != 0.0 && d0 / d1 > 0.0) r.order = std::clamp(std::log2(d0 / d1), 1.0, 3.0);
  }
  r.value = a2 + (a2 - a1) / (std::pow(2.0, r.order) - 1.0);
  return r;
}

}  // namespace mhom
