#pragma once

// Volume statistics ρ, θ and the effective tensor A⁰ from corrector window
// fluxes, with Monte-Carlo standard errors and the ellipticity checks.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mhom/conductivity.hpp"
#include "mhom/corrector.hpp"
#include "mhom/geometry.hpp"

namespace mhom {

struct VolumeStats {
  double rho = 0.0;
  double rho_stderr = 0.0;
  double theta = 0.0;
  double theta_stderr = 0.0;
  int samples = 0;
};

/// ∫_Y det ∇Φ and ∫_{Y-} det ∇Φ for one reference cell map (bit 0 or 1).
std::pair<double, double> cell_volumes(const BumpParams &bump, int bit, const InterfaceSpec &spec = {});

/// ρ and θ averaged over the central cell of each seed's realization.
VolumeStats volume_stats(const DeformationMap &map, const std::vector<std::uint64_t> &seeds,
                         const InterfaceSpec &spec = {});

/// Sample standard error of the mean (0 for fewer than two values).
double standard_error(const std::vector<double> &x);

/// One realization: window averages over Q_m per unit reference cell.
struct SeedSample {
  std::uint64_t seed = 0;
  /// flux(i, j) = e_j · F(e_i), F = F+ + F-.
  Mat2 flux;
  /// energy(i, j) = ∫ (e_i + ∇w_i)·A(e_j + ∇w_j) + ∫_Γ [w_i][w_j].
  Mat2 energy;
};

SeedSample seed_sample(const TruncatedProblem &problem, const Conductivity &A, const CorrectorSolution &w1,
                       const CorrectorSolution &w2, int m, std::uint64_t seed);

struct EffectiveTensor {
  Mat2 A0;
  Mat2 stderr_;
  int N = 0;
  double rho = 1.0;
  double theta = 0.0;
  double theta_stderr = 0.0;
  std::string config_hash;
  /// (1/ρ) E[energy]; the energy identity says this equals the symmetric part of A0.
  Mat2 energy;
  Mat2 energy_stderr;

  double max_stderr() const { return stderr_.max_abs(); }
};

/// a_ij = (1/ρ) mean over samples of flux(i, j). A single sample is accepted
/// only when `deterministic` (stderr then 0); otherwise N < 2 throws
/// InsufficientSamples.
EffectiveTensor effective_tensor(const std::vector<SeedSample> &samples, double rho, bool deterministic = false);

struct EllipticityVerdict {
  std::array<double, 2> eigenvalues{};
  /// a0 ξ·ξ − ξ·energy ξ for ξ = e1, e2, (e1+e2)/√2.
  std::array<double, 3> energy_residuals{};
  double max_residual = 0.0;
};

/// Throws EllipticityViolation if the smallest eigenvalue of the symmetric part
/// is not positive or the largest exceeds Λ + 3·stderr.
EllipticityVerdict ellipticity_check(const EffectiveTensor &t, double lambda, double Lambda);

struct EffectiveRun {
  DeformationMap map = DeformationMap::identity();
  Conductivity A = Conductivity::identity();
  InterfaceSpec spec{};
  double h = 0.05;
  int n = 8;
  int m = 4;
  double delta = 1e-3;
  std::vector<std::uint64_t> seeds{0};
  bool membranes = true;
  int jobs = 1;
};

struct EffectiveResult {
  EffectiveTensor tensor;
  VolumeStats volume;
  std::vector<SeedSample> samples;
  /// Per seed: window fluxes (F+, F-) for p = e1 and p = e2.
  std::vector<std::array<std::pair<Vec2, Vec2>, 2>> window_fluxes;
  /// Per seed: E_k for p = e1.
  std::vector<std::vector<double>> energy_profiles;
};

EffectiveResult run_effective(const EffectiveRun &run);

}  // namespace mhom
