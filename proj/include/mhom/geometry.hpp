#pragma once

// Unit-cell interface and the cellwise deformation maps of the random medium.
//
// Every map in this file fixes the boundary of each unit cell Y_k = k + [0,1)^2
// pointwise, except the test-only uniform scaling. A map therefore sends each
// cell onto itself and is fully described by one reference diffeomorphism per
// cell, selected by a per-cell bit: bit 0 is the identity, bit 1 the bump.

#include <cstdint>
#include <optional>
#include <string>

#include "mhom/types.hpp"

namespace mhom {

/// Circular inclusion inside the unit cell.
struct InterfaceSpec {
  Vec2 center{0.5, 0.5};
  double radius = 0.25;

  /// dist(boundary of Y, interface).
  double margin() const;
  /// Throws std::invalid_argument if the circle does not sit strictly inside Y.
  void validate() const;
};

/// Counter-based i.i.d. Bernoulli(1/2) field over Z^2.
///
/// The bit of cell k depends only on (seed, k + offset), so evaluation order is
/// irrelevant and the lattice shift tau_j is just an offset change.
class BernoulliField {
 public:
  explicit BernoulliField(std::uint64_t seed, CellIndex offset = {}) : seed_(seed), offset_(offset) {}

  int bit(CellIndex k) const;
  /// Field of the shifted environment: shifted(j).bit(k) == bit(k + j).
  BernoulliField shifted(CellIndex j) const { return BernoulliField(seed_, offset_ + j); }

  std::uint64_t seed() const { return seed_; }
  CellIndex offset() const { return offset_; }

 private:
  std::uint64_t seed_;
  CellIndex offset_;
};

/// SplitMix64 finalizer; also used to derive per-sample seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Smooth radial bump displacement a * psi(|y - c| / R) * u inside one cell,
/// psi(s) = exp(-1 / (1 - s^2)) for s < 1 and 0 otherwise.
struct BumpParams {
  double amplitude = 0.1;
  Vec2 center{0.5, 0.5};
  Vec2 direction{1.0, 0.0};
  double support_radius = 0.5;
};

enum class MapKind { Identity, Bump, Bernoulli, Scaling };

std::string to_string(MapKind kind);
std::optional<MapKind> parse_map_kind(const std::string &name);

/// Sampled bounds of a map: mu <= det(grad Phi), |grad Phi| <= M, |D^2 Phi| <= M.
struct MapBounds {
  double mu = 1.0;
  double M = 1.0;
};

class DeformationMap {
 public:
  static DeformationMap identity();
  /// The same bump in every cell (X_k = 1 for all k).
  static DeformationMap bump(const BumpParams &bump = {});
  static DeformationMap bernoulli(std::uint64_t seed, const BumpParams &bump = {});
  /// Phi(y) = s * y. Test-only: it does not fix cell boundaries.
  static DeformationMap scaling(double factor);

  MapKind kind() const { return kind_; }
  const BumpParams &bump_params() const { return bump_; }
  const std::optional<BernoulliField> &field() const { return field_; }
  double scale_factor() const { return scale_; }
  bool preserves_cells() const { return kind_ != MapKind::Scaling; }

  /// Same map with another realization seed (no-op for deterministic kinds).
  DeformationMap with_seed(std::uint64_t seed) const;
  /// Realization tau_j omega (only meaningful for the Bernoulli kind).
  DeformationMap shifted(CellIndex j) const;

  /// Bit selecting the reference map used in cell k.
  int cell_bit(CellIndex k) const;

  Vec2 apply(Vec2 y) const;
  Mat2 jacobian(Vec2 y) const;
  /// Phi^{-1}(x) by damped Newton inside the cell containing x.
  Vec2 inverse(Vec2 x) const;

  /// k + Phi_{X_k}(y_local) for y_local in the closed unit cell.
  Vec2 apply_in_cell(CellIndex k, Vec2 y_local) const;
  Mat2 jacobian_in_cell(CellIndex k, Vec2 y_local) const;

  /// Length distortion |grad Phi(x) t| of a unit tangent t at x.
  double surface_factor(Vec2 x, Vec2 unit_tangent) const;
  /// The same factor written as |grad Phi^{-T} n| det grad Phi for the unit normal n.
  double surface_factor_normal_form(Vec2 x, Vec2 unit_normal) const;

  /// Bounds sampled on a grid of samples x samples points in one bump cell.
  MapBounds sample_bounds(int samples = 200) const;

 private:
  DeformationMap() = default;

  MapKind kind_ = MapKind::Identity;
  BumpParams bump_{};
  std::optional<BernoulliField> field_;
  double scale_ = 1.0;
};

/// Reference-cell maps: Phi_0 = Id and Phi_1 = Id + bump.
Vec2 bump_apply(const BumpParams &b, Vec2 y);
Mat2 bump_jacobian(const BumpParams &b, Vec2 y);

}  // namespace mhom
