#include "mhom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mhom/errors.hpp"

namespace mhom {

double InterfaceSpec::margin() const {
  const double to_edge = std::min({center.x, 1.0 - center.x, center.y, 1.0 - center.y});
  return to_edge - radius;
}

void InterfaceSpec::validate() const {
  if (!(radius > 0.0 && radius < 0.5)) throw std::invalid_argument("interface radius must lie in (0, 0.5)");
  if (!(margin() > 0.0)) throw std::invalid_argument("interface must lie strictly inside the unit cell");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int BernoulliField::bit(CellIndex k) const {
  const CellIndex c = k + offset_;
  const std::uint64_t counter = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                                static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.y));
  return static_cast<int>(splitmix64(splitmix64(seed_) ^ counter) >> 63);
}

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Identity: return "identity";
    case MapKind::Bump: return "bump";
    case MapKind::Bernoulli: return "bernoulli";
    case MapKind::Scaling: return "scaling";
  }
  return "unknown";
}

std::optional<MapKind> parse_map_kind(const std::string &name) {
  if (name == "identity") return MapKind::Identity;
  if (name == "bump") return MapKind::Bump;
  if (name == "bernoulli") return MapKind::Bernoulli;
  if (name == "scaling") return MapKind::Scaling;
  return std::nullopt;
}

namespace {

// psi(s) = exp(-1/(1-s^2)) on s < 1.
double mollifier(double s2) { return s2 < 1.0 ? std::exp(-1.0 / (1.0 - s2)) : 0.0; }

}  // namespace

Vec2 bump_apply(const BumpParams &b, Vec2 y) {
  const Vec2 d = y - b.center;
  const double s2 = dot(d, d) / (b.support_radius * b.support_radius);
  return y + (b.amplitude * mollifier(s2)) * b.direction;
}

Mat2 bump_jacobian(const BumpParams &b, Vec2 y) {
  const Vec2 d = y - b.center;
  const double R2 = b.support_radius * b.support_radius;
  const double s2 = dot(d, d) / R2;
  if (s2 >= 1.0) return Mat2::identity();
  const double one_minus = 1.0 - s2;
  // grad psi(|d|/R) = psi * (-2 / (1 - s^2)^2) * d / R^2
  const double g = mollifier(s2) * (-2.0 / (one_minus * one_minus)) / R2;
  const Vec2 grad{g * d.x, g * d.y};
  const Vec2 u = b.direction;
  const double a = b.amplitude;
  return {1.0 + a * u.x * grad.x, a * u.x * grad.y, a * u.y * grad.x, 1.0 + a * u.y * grad.y};
}

DeformationMap DeformationMap::identity() { return DeformationMap{}; }

DeformationMap DeformationMap::bump(const BumpParams &bump) {
  DeformationMap m;
  m.kind_ = MapKind::Bump;
  m.bump_ = bump;
  return m;
}

DeformationMap DeformationMap::bernoulli(std::uint64_t seed, const BumpParams &bump) {
  DeformationMap m;
  m.kind_ = MapKind::Bernoulli;
  m.bump_ = bump;
  m.field_.emplace(seed);
  return m;
}

DeformationMap DeformationMap::scaling(double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scaling factor must be positive");
  DeformationMap m;
  m.kind_ = MapKind::Scaling;
  m.scale_ = factor;
  return m;
}

DeformationMap DeformationMap::with_seed(std::uint64_t seed) const {
  if (kind_ != MapKind::Bernoulli) return *this;
  DeformationMap m = *this;
  m.field_.emplace(seed);
  return m;
}

DeformationMap DeformationMap::shifted(CellIndex j) const {
  DeformationMap m = *this;
  if (field_) m.field_ = field_->shifted(j);
  return m;
}

int DeformationMap::cell_bit(CellIndex k) const {
  switch (kind_) {
    case MapKind::Bump: return 1;
    case MapKind::Bernoulli: return field_->bit(k);
    default: return 0;
  }
}

namespace {

CellIndex cell_of(Vec2 y) {
  return {static_cast<int>(std::floor(y.x)), static_cast<int>(std::floor(y.y))};
}

Vec2 local_in(CellIndex k, Vec2 y) { return {y.x - k.x, y.y - k.y}; }

}  // namespace

Vec2 DeformationMap::apply_in_cell(CellIndex k, Vec2 y_local) const {
  if (kind_ == MapKind::Scaling) return scale_ * Vec2{y_local.x + k.x, y_local.y + k.y};
  const Vec2 local = cell_bit(k) ? bump_apply(bump_, y_local) : y_local;
  return {k.x + local.x, k.y + local.y};
}

Mat2 DeformationMap::jacobian_in_cell(CellIndex k, Vec2 y_local) const {
  if (kind_ == MapKind::Scaling) return Mat2::diag(scale_, scale_);
  return cell_bit(k) ? bump_jacobian(bump_, y_local) : Mat2::identity();
}

Vec2 DeformationMap::apply(Vec2 y) const {
  if (kind_ == MapKind::Identity) return y;
  if (kind_ == MapKind::Scaling) return scale_ * y;
  const CellIndex k = cell_of(y);
  return apply_in_cell(k, local_in(k, y));
}

Mat2 DeformationMap::jacobian(Vec2 y) const {
  if (kind_ == MapKind::Identity) return Mat2::identity();
  if (kind_ == MapKind::Scaling) return Mat2::diag(scale_, scale_);
  const CellIndex k = cell_of(y);
  return jacobian_in_cell(k, local_in(k, y));
}

Vec2 DeformationMap::inverse(Vec2 x) const {
  if (kind_ == MapKind::Identity) return x;
  if (kind_ == MapKind::Scaling) return (1.0 / scale_) * x;
  const CellIndex k = cell_of(x);
  if (cell_bit(k) == 0) return x;

  // Phi maps the cell onto itself, so Newton runs in local coordinates.
  const Vec2 target = local_in(k, x);
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 100;
  Vec2 z = target;
  Vec2 res = bump_apply(bump_, z) - target;
  double res_norm = norm(res);
  for (int it = 0; it < kMaxIter; ++it) {
    if (res_norm <= kTol) {
      // One more step polishes the iterate well below the tolerance.
      const Vec2 step = bump_jacobian(bump_, z).inverse() * res;
      const Vec2 polished = z - step;
      const double polished_norm = norm(bump_apply(bump_, polished) - target);
      if (polished_norm < res_norm) z = polished;
      return {z.x + k.x, z.y + k.y};
    }
    const Vec2 step = bump_jacobian(bump_, z).inverse() * res;
    double lambda = 1.0;
    Vec2 trial = z - step;
    Vec2 trial_res = bump_apply(bump_, trial) - target;
    int halvings = 0;
    while (norm(trial_res) > res_norm && halvings < 30) {
      lambda *= 0.5;
      trial = z - lambda * step;
      trial_res = bump_apply(bump_, trial) - target;
      ++halvings;
    }
    z = trial;
    res = trial_res;
    res_norm = norm(res);
  }
  throw NonConvergence("inverse_phi: Newton did not converge in 100 iterations");
}

double DeformationMap::surface_factor(Vec2 x, Vec2 unit_tangent) const {
  return norm(jacobian(x) * unit_tangent);
}

double DeformationMap::surface_factor_normal_form(Vec2 x, Vec2 unit_normal) const {
  const Mat2 J = jacobian(x);
  return norm(J.inverse().transpose() * unit_normal) * J.det();
}

MapBounds DeformationMap::sample_bounds(int samples) const {
  MapBounds out;
  if (kind_ == MapKind::Identity) return out;
  if (kind_ == MapKind::Scaling) {
    out.mu = scale_ * scale_;
    out.M = scale_;
    return out;
  }
  // Every non-identity cell carries the same bump, so one cell suffices.
  out.mu = 1.0;
  out.M = 1.0;
  const double fd = 1e-5;
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const Vec2 y{(i + 0.5) / samples, (j + 0.5) / samples};
      const Mat2 J = bump_jacobian(bump_, y);
      out.mu = std::min(out.mu, J.det());
      out.M = std::max(out.M, J.op_norm());
      const Mat2 dx = (bump_jacobian(bump_, y + Vec2{fd, 0}) + bump_jacobian(bump_, y - Vec2{fd, 0}) * -1.0) * (0.5 / fd);
      const Mat2 dy = (bump_jacobian(bump_, y + Vec2{0, fd}) + bump_jacobian(bump_, y - Vec2{0, fd}) * -1.0) * (0.5 / fd);
      const double hess = std::sqrt(dx.a11 * dx.a11 + dx.a12 * dx.a12 + dx.a21 * dx.a21 + dx.a22 * dx.a22 +
                                    dy.a11 * dy.a11 + dy.a12 * dy.a12 + dy.a21 * dy.a21 + dy.a22 * dy.a22);
      out.M = std::max(out.M, hess);
    }
  }
  return out;
}

}  // namespace mhom
