#include "mhom/effective.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "mhom/errors.hpp"
#include "mhom/parallel.hpp"
#include "mhom/quadrature.hpp"

namespace mhom {

std::pair<double, double> cell_volumes(const BumpParams &bump, int bit, const InterfaceSpec &spec) {
  const double r = spec.radius;
  if (bit == 0) return {1.0, std::numbers::pi * r * r};

  std::vector<double> gx, gw;
  quad::gauss_legendre(8, gx, gw);
  const int panels = 32;
  const double hp = 1.0 / panels;
  double full = 0.0;
  for (int pj = 0; pj < panels; ++pj)
    for (int pi = 0; pi < panels; ++pi)
      for (std::size_t a = 0; a < gx.size(); ++a)
        for (std::size_t b = 0; b < gx.size(); ++b) {
          const Vec2 y{(pi + 0.5 * (gx[a] + 1.0)) * hp, (pj + 0.5 * (gx[b] + 1.0)) * hp};
          full += gw[a] * gw[b] * 0.25 * hp * hp * bump_jacobian(bump, y).det();
        }

  // Polar rule on the disc: Gauss in the radius, trapezoid in the angle.
  std::vector<double> rx, rw;
  quad::gauss_legendre(48, rx, rw);
  const int angles = 512;
  double inner = 0.0;
  for (std::size_t a = 0; a < rx.size(); ++a) {
    const double rho = 0.5 * r * (rx[a] + 1.0);
    for (int k = 0; k < angles; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / angles;
      const Vec2 y = spec.center + Vec2{rho * std::cos(phi), rho * std::sin(phi)};
      inner += rw[a] * 0.5 * r * rho * (2.0 * std::numbers::pi / angles) * bump_jacobian(bump, y).det();
    }
  }
  return {full, inner};
}

double standard_error(const std::vector<double> &x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

VolumeStats volume_stats(const DeformationMap &map, const std::vector<std::uint64_t> &seeds, const InterfaceSpec &spec) {
  if (seeds.empty()) throw std::invalid_argument("volume_stats: need at least one seed");
  std::map<int, std::pair<double, double>> cache;
  std::vector<double> full, inner;
  for (std::uint64_t s : seeds) {
    const int bit = map.with_seed(s).cell_bit({0, 0});
    auto it = cache.find(bit);
    if (it == cache.end()) it = cache.emplace(bit, cell_volumes(map.bump_params(), bit, spec)).first;
    full.push_back(it->second.first);
    inner.push_back(it->second.second);
  }
  VolumeStats st;
  st.samples = static_cast<int>(seeds.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    st.rho += full[i];
    st.theta += inner[i];
  }
  st.rho /= static_cast<double>(full.size());
  st.theta /= static_cast<double>(full.size()) * st.rho;
  st.rho_stderr = standard_error(full);
  st.theta_stderr = standard_error(inner) / st.rho;
  if (!(st.theta > 0.0 && st.theta < 1.0)) throw HypothesisViolation("volume_stats: theta outside (0, 1)");
  return st;
}

SeedSample seed_sample(const TruncatedProblem &problem, const Conductivity &A, const CorrectorSolution &w1,
                       const CorrectorSolution &w2, int m, std::uint64_t seed) {
  const MembraneMesh &mesh = problem.mesh();
  const CellIndex off = w1.offset;
  const auto in_window = [&](CellIndex k) {
    return k.x >= off.x - m && k.x < off.x + m && k.y >= off.y - m && k.y < off.y + m;
  };
  const auto &u1 = w1.fem.values;
  const auto &u2 = w2.fem.values;
  double e11 = 0.0, e12 = 0.0, e22 = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!in_window(mesh.triangle_cells[t])) continue;
    const auto &tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const double area = 0.5 * cross(b - a, c - a);
    const auto G = hat_gradients(a, b, c);
    const Vec2 g1 = Vec2{1.0, 0.0} + u1[tri[0]] * G[0] + u1[tri[1]] * G[1] + u1[tri[2]] * G[2];
    const Vec2 g2 = Vec2{0.0, 1.0} + u2[tri[0]] * G[0] + u2[tri[1]] * G[1] + u2[tri[2]] * G[2];
    const Mat2 At = triangle_conductivity(mesh, A, t);
    e11 += area * dot(g1, At * g1);
    e12 += area * dot(g1, At * g2);
    e22 += area * dot(g2, At * g2);
  }
  for (const auto &seg : mesh.interface_segments) {
    const auto &pa = mesh.interface_pairs[seg[0]];
    const auto &pb = mesh.interface_pairs[seg[1]];
    const Vec2 mid = 0.5 * (mesh.reference[pa[0]] + mesh.reference[pb[0]]);
    if (!in_window({static_cast<int>(std::floor(mid.x)), static_cast<int>(std::floor(mid.y))})) continue;
    const double L = norm(mesh.vertices[pb[0]] - mesh.vertices[pa[0]]);
    const double ja1 = u1[pa[0]] - u1[pa[1]], jb1 = u1[pb[0]] - u1[pb[1]];
    const double ja2 = u2[pa[0]] - u2[pa[1]], jb2 = u2[pb[0]] - u2[pb[1]];
    const auto edge = [L](double xa, double xb, double ya, double yb) {
      return L / 6.0 * (2.0 * xa * ya + xa * yb + xb * ya + 2.0 * xb * yb);
    };
    e11 += edge(ja1, jb1, ja1, jb1);
    e12 += edge(ja1, jb1, ja2, jb2);
    e22 += edge(ja2, jb2, ja2, jb2);
  }
  const double inv = 1.0 / (4.0 * m * m);
  const auto f1 = w1.window_flux(m);
  const auto f2 = w2.window_flux(m);
  const Vec2 F1 = f1.first + f1.second, F2 = f2.first + f2.second;
  SeedSample s;
  s.seed = seed;
  s.flux = {F1.x, F1.y, F2.x, F2.y};
  s.energy = {e11 * inv, e12 * inv, e12 * inv, e22 * inv};
  return s;
}

EffectiveTensor effective_tensor(const std::vector<SeedSample> &samples, double rho, bool deterministic) {
  const std::size_t N = samples.size();
  if (N == 0 || (N < 2 && !deterministic))
    throw InsufficientSamples("effective_tensor: at least two samples are needed for a standard error");
  if (!(rho > 0.0)) throw std::invalid_argument("effective_tensor: rho must be positive");
  EffectiveTensor t;
  t.N = static_cast<int>(N);
  t.rho = rho;
  double a[4] = {}, s[4] = {}, e[4] = {}, es[4] = {};
  for (int idx = 0; idx < 4; ++idx) {
    std::vector<double> fx, ex;
    for (const auto &smp : samples) {
      fx.push_back(smp.flux(idx / 2, idx % 2) / rho);
      ex.push_back(smp.energy(idx / 2, idx % 2) / rho);
    }
    for (double v : fx) a[idx] += v;
    for (double v : ex) e[idx] += v;
    a[idx] /= static_cast<double>(N);
    e[idx] /= static_cast<double>(N);
    s[idx] = standard_error(fx);
    es[idx] = standard_error(ex);
  }
  t.A0 = {a[0], a[1], a[2], a[3]};
  t.stderr_ = {s[0], s[1], s[2], s[3]};
  t.energy = {e[0], e[1], e[2], e[3]};
  t.energy_stderr = {es[0], es[1], es[2], es[3]};
  return t;
}

EllipticityVerdict ellipticity_check(const EffectiveTensor &t, double lambda, double Lambda) {
  (void)lambda;
  EllipticityVerdict v;
  v.eigenvalues = t.A0.sym_eigenvalues();
  const double r = std::numbers::sqrt2 / 2.0;
  const std::array<Vec2, 3> xis{Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, Vec2{r, r}};
  for (int i = 0; i < 3; ++i) {
    const Vec2 xi = xis[i];
    v.energy_residuals[i] = dot(xi, t.A0 * xi) - dot(xi, t.energy * xi);
    v.max_residual = std::max(v.max_residual, std::fabs(v.energy_residuals[i]));
  }
  if (!(v.eigenvalues[0] > 0.0))
    throw EllipticityViolation("effective tensor has a non-positive eigenvalue (" + std::to_string(v.eigenvalues[0]) + ")");
  if (v.eigenvalues[1] > Lambda + 3.0 * t.max_stderr())
    throw EllipticityViolation("effective tensor eigenvalue " + std::to_string(v.eigenvalues[1]) +
                               " exceeds the upper ellipticity bound");
  return v;
}

EffectiveResult run_effective(const EffectiveRun &run) {
  if (run.seeds.empty()) throw InsufficientSamples("run_effective: empty seed list");
  CorrectorConfig{{1.0, 0.0}, run.delta, run.n, run.m, run.h, 0}.validate();
  const CellMesh cell = build_cell_mesh(run.spec, run.h);
  const std::size_t N = run.seeds.size();

  EffectiveResult res;
  res.samples.resize(N);
  res.window_fluxes.resize(N);
  res.energy_profiles.resize(N);
  parallel_for(N, run.jobs, [&](std::size_t i) {
    const std::uint64_t seed = run.seeds[i];
    const TruncatedProblem problem(cell, run.map.with_seed(seed), run.A, run.n, run.delta, {}, run.membranes);
    const CorrectorSolution w1 = problem.solve({1.0, 0.0});
    const CorrectorSolution w2 = problem.solve({0.0, 1.0});
    res.samples[i] = seed_sample(problem, run.A, w1, w2, run.m, seed);
    res.window_fluxes[i] = {w1.window_flux(run.m), w2.window_flux(run.m)};
    res.energy_profiles[i] = energy_profile(w1);
  });

  res.volume = volume_stats(run.map, run.seeds, run.spec);
  const bool deterministic = run.map.kind() != MapKind::Bernoulli;
  res.tensor = effective_tensor(res.samples, res.volume.rho, deterministic);
  res.tensor.theta = res.volume.theta;
  res.tensor.theta_stderr = res.volume.theta_stderr;
  return res;
}

}  // namespace mhom
