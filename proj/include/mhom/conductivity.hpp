#pragma once

// Periodic reference conductivity fields; A(x) = Ã(Φ^{-1}(x)).

#include <optional>
#include <string>

#include "mhom/types.hpp"

namespace mhom {

enum class ConductivityPreset { Identity, Anisotropic, Constant };

class Conductivity {
 public:
  static Conductivity identity();
  /// diag(1 + 0.5 sin^2(2 pi y1), 1).
  static Conductivity anisotropic();
  /// Spatially constant symmetric matrix; throws NonEllipticField otherwise.
  static Conductivity constant(const Mat2 &a);

  ConductivityPreset preset() const { return preset_; }
  const std::string &name() const { return name_; }

  /// Value at a reference (undeformed) point; periodic with period 1.
  Mat2 at(Vec2 y) const;
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }

 private:
  Conductivity() = default;

  ConductivityPreset preset_ = ConductivityPreset::Identity;
  std::string name_ = "identity";
  Mat2 value_ = Mat2::identity();
  double lambda_ = 1.0;
  double Lambda_ = 1.0;
};

std::optional<Conductivity> conductivity_from_name(const std::string &name);

/// Throws NonEllipticField unless a is symmetric (1e-12) with eigenvalues in [lo, hi].
void check_elliptic(const Mat2 &a, double lo, double hi);

}  // namespace mhom
