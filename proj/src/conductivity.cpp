#include "mhom/conductivity.hpp"

#include <cmath>
#include <numbers>

#include "mhom/errors.hpp"

namespace mhom {

Conductivity Conductivity::identity() { return Conductivity(); }

Conductivity Conductivity::anisotropic() {
  Conductivity c;
  c.preset_ = ConductivityPreset::Anisotropic;
  c.name_ = "anisotropic";
  c.lambda_ = 1.0;
  c.Lambda_ = 1.5;
  return c;
}

Conductivity Conductivity::constant(const Mat2 &a) {
  const auto ev = a.sym_eigenvalues();
  check_elliptic(a, ev[0], ev[1]);
  if (!(ev[0] > 0.0)) throw NonEllipticField("Conductivity::constant: matrix is not positive definite");
  Conductivity c;
  c.preset_ = ConductivityPreset::Constant;
  c.name_ = "constant";
  c.value_ = a;
  c.lambda_ = ev[0];
  c.Lambda_ = ev[1];
  return c;
}

Mat2 Conductivity::at(Vec2 y) const {
  switch (preset_) {
    case ConductivityPreset::Anisotropic: {
      const double s = std::sin(2.0 * std::numbers::pi * y.x);
      return Mat2::diag(1.0 + 0.5 * s * s, 1.0);
    }
    case ConductivityPreset::Constant: return value_;
    default: return Mat2::identity();
  }
}

std::optional<Conductivity> conductivity_from_name(const std::string &name) {
  if (name == "identity") return Conductivity::identity();
  if (name == "anisotropic") return Conductivity::anisotropic();
  return std::nullopt;
}

void check_elliptic(const Mat2 &a, double lo, double hi) {
  if (!std::isfinite(a.a11) || !std::isfinite(a.a12) || !std::isfinite(a.a21) || !std::isfinite(a.a22))
    throw NonEllipticField("conductivity has non-finite entries");
  if (std::fabs(a.a12 - a.a21) > 1e-12) throw NonEllipticField("conductivity is not symmetric");
  const auto ev = a.sym_eigenvalues();
  const double slack = 1e-12 * std::max(1.0, std::fabs(hi));
  if (!(ev[0] > 0.0) || ev[0] < lo - slack || ev[1] > hi + slack)
    throw NonEllipticField("conductivity violates its ellipticity bounds");
}

}  // namespace mhom
