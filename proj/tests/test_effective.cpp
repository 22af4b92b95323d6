#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mhom/effective.hpp"
#include "mhom/errors.hpp"

using namespace mhom;

namespace {

// det ∇Φ for the bump y + a ψ(|y - c| / R) e1, written out by hand.
double bump_det(Vec2 y, double a) {
  const double dx = y.x - 0.5, dy = y.y - 0.5, R2 = 0.25;
  const double s2 = (dx * dx + dy * dy) / R2;
  if (s2 >= 1.0) return 1.0;
  const double psi = std::exp(-1.0 / (1.0 - s2));
  const double dpsi_dx = psi * (-2.0 / ((1.0 - s2) * (1.0 - s2))) * dx / R2;
  return 1.0 + a * dpsi_dx;
}

// 10^6-point polar midpoint rule over the disk of radius 0.25.
double theta_oracle(double a) {
  const int nr = 1000, nt = 1000;
  const double r0 = 0.25;
  double s = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * r0 / nr;
    for (int j = 0; j < nt; ++j) {
      const double t = (j + 0.5) * 2.0 * std::numbers::pi / nt;
      s += r * bump_det({0.5 + r * std::cos(t), 0.5 + r * std::sin(t)}, a);
    }
  }
  return s * (r0 / nr) * (2.0 * std::numbers::pi / nt);
}

EffectiveRun cheap_run(const DeformationMap &map, std::vector<std::uint64_t> seeds) {
  EffectiveRun r;
  r.map = map;
  r.h = 0.25;
  r.n = 2;
  r.m = 1;
  r.seeds = std::move(seeds);
  return r;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < count; ++i) s.push_back(splitmix64(first + i));
  return s;
}

}  // namespace

TEST_CASE("volume statistics: identity") {
  const VolumeStats v = volume_stats(DeformationMap::identity(), {1});
  CHECK(v.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(v.theta - std::numbers::pi / 16.0) <= 1e-6);
}

TEST_CASE("volume statistics: bump against the dense oracle") {
  const auto [rho, minus] = cell_volumes(BumpParams{}, 1);
  CHECK(std::abs(rho - 1.0) <= 1e-10);
  const double oracle = theta_oracle(0.1);
  CHECK(std::abs(minus / rho - oracle) <= 1e-5);
  // A larger amplitude still preserves the full-cell volume.
  BumpParams big;
  big.amplitude = 0.2;
  CHECK(std::abs(cell_volumes(big, 1).first - 1.0) <= 1e-10);
  CHECK(std::abs(cell_volumes(big, 1).second - theta_oracle(0.2)) <= 1e-5);
}

TEST_CASE("volume statistics: bernoulli average") {
  const auto seeds = seed_range(500, 64);
  const VolumeStats v = volume_stats(DeformationMap::bernoulli(0), seeds);
  const double analytic = 0.5 * (cell_volumes(BumpParams{}, 0).second + cell_volumes(BumpParams{}, 1).second);
  CHECK(std::abs(v.theta - analytic) <= 3.0 * v.theta_stderr + 1e-12);
  CHECK(v.rho == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(v.theta > 0.0);
  CHECK(v.theta < 1.0);
}

TEST_CASE("no membranes: the effective tensor is the identity") {
  EffectiveRun r = cheap_run(DeformationMap::identity(), {1});
  r.membranes = false;
  const EffectiveResult res = run_effective(r);
  CHECK((res.tensor.A0 + Mat2::identity() * -1.0).max_abs() <= 1e-6);
  const EllipticityVerdict v = ellipticity_check(res.tensor, 1.0, 1.0);
  CHECK(v.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(v.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("periodic membranes: isotropic and below one") {
  EffectiveRun r = cheap_run(DeformationMap::identity(), {1});
  r.h = 0.1;
  r.n = 4;
  r.m = 2;
  const EffectiveResult res = run_effective(r);
  const Mat2 &a = res.tensor.A0;
  CHECK(a.a11 < 1.0);
  CHECK(a.a11 > 0.5);
  CHECK(std::abs(a.a11 - a.a22) <= 1e-3);
  CHECK(std::abs(a.a12) <= 1e-3);
  CHECK(std::abs(a.a21) <= 1e-3);
  CHECK(res.tensor.N == 1);
  CHECK(res.tensor.max_stderr() == 0.0);
}

TEST_CASE("bernoulli media: symmetric and elliptic") {
  const EffectiveResult res = run_effective(cheap_run(DeformationMap::bernoulli(0), seed_range(40, 16)));
  const EffectiveTensor &t = res.tensor;
  CHECK(t.N == 16);
  CHECK(std::abs(t.A0.a12 - t.A0.a21) <= 2.0 * std::hypot(t.stderr_.a12, t.stderr_.a21) + 1e-12);
  const EllipticityVerdict v = ellipticity_check(t, 1.0, 1.0);
  CHECK(v.eigenvalues[0] > 0.0);
  CHECK(v.eigenvalues[1] <= 1.0 + 3.0 * t.max_stderr());
  CHECK(res.volume.theta > 0.0);
  CHECK(res.volume.theta < 1.0);
}

TEST_CASE("linearity of the tensor columns") {
  const CellMesh cell = build_cell_mesh({}, 0.25);
  const TruncatedProblem P(cell, DeformationMap::bernoulli(9), Conductivity::anisotropic(), 2, 1e-3);
  const auto [a1, b1] = P.solve({1.0, 0.0}).window_flux(1);
  const auto [a2, b2] = P.solve({0.0, 1.0}).window_flux(1);
  const auto [a3, b3] = P.solve({1.0, 1.0}).window_flux(1);
  CHECK(norm(a3 + b3 - (a1 + b1) - (a2 + b2)) <= 1e-6);
}

TEST_CASE("standard error shrinks like 1/sqrt(N)") {
  // Pool variances over disjoint batches so each N has a comparable number of
  // degrees of freedom.
  const EffectiveResult res = run_effective(cheap_run(DeformationMap::bernoulli(0), seed_range(900, 64)));
  std::vector<double> a11;
  for (const auto &s : res.samples) a11.push_back(s.flux.a11);
  const auto pooled = [&](int N) {
    double v = 0.0;
    const int batches = 64 / N;
    for (int b = 0; b < batches; ++b) {
      const std::vector<double> part(a11.begin() + b * N, a11.begin() + (b + 1) * N);
      const double se = standard_error(part);
      v += se * se;
    }
    return std::sqrt(v / batches);
  };
  const double s4 = pooled(4), s16 = pooled(16), s64 = pooled(64);
  REQUIRE(s64 > 0.0);
  CHECK(s4 / s16 == doctest::Approx(2.0).epsilon(0.25));
  CHECK(s16 / s64 == doctest::Approx(2.0).epsilon(0.25));
  CHECK(s4 / s64 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("sample count and injected faults") {
  SeedSample s;
  s.flux = Mat2::identity();
  s.energy = Mat2::identity();
  CHECK_THROWS_AS(effective_tensor({s}, 1.0), InsufficientSamples);
  CHECK_NOTHROW(effective_tensor({s}, 1.0, true));

  EffectiveTensor bad;
  bad.A0 = Mat2::diag(1.0, -0.1);
  bad.energy = bad.A0;
  CHECK_THROWS_AS(ellipticity_check(bad, 1.0, 1.0), EllipticityViolation);
  EffectiveTensor big;
  big.A0 = Mat2::diag(1.0, 3.0);
  big.energy = big.A0;
  CHECK_THROWS_AS(ellipticity_check(big, 1.0, 1.5), EllipticityViolation);
}

TEST_CASE("standard error helper") {
  CHECK(standard_error({}) == 0.0);
  CHECK(standard_error({2.0}) == 0.0);
  CHECK(standard_error({1.0, 3.0}) == doctest::Approx(1.0));
}
