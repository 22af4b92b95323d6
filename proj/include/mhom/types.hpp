#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mhom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 &operator+=(const Vec2 &o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2 &operator-=(const Vec2 &o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2 &operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator-(const Vec2 &a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 &a, const Vec2 &b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 &a) { return std::hypot(a.x, a.y); }

/// Integer lattice index of a unit cell.
struct CellIndex {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(const CellIndex &, const CellIndex &) = default;
  friend constexpr CellIndex operator+(CellIndex a, CellIndex b) { return {a.x + b.x, a.y + b.y}; }
};

/// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

  constexpr double det() const { return a11 * a22 - a12 * a21; }
  constexpr Mat2 transpose() const { return {a11, a21, a12, a22}; }
  constexpr Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  constexpr Vec2 operator*(const Vec2 &v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }
  constexpr Mat2 operator*(const Mat2 &m) const {
    return {a11 * m.a11 + a12 * m.a21, a11 * m.a12 + a12 * m.a22,
            a21 * m.a11 + a22 * m.a21, a21 * m.a12 + a22 * m.a22};
  }
  constexpr Mat2 operator+(const Mat2 &m) const {
    return {a11 + m.a11, a12 + m.a12, a21 + m.a21, a22 + m.a22};
  }
  constexpr Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
  constexpr double operator()(int i, int j) const {
    return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
  }
  friend constexpr bool operator==(const Mat2 &, const Mat2 &) = default;

  /// Largest absolute entry.
  double max_abs() const {
    return std::fmax(std::fmax(std::fabs(a11), std::fabs(a12)),
                     std::fmax(std::fabs(a21), std::fabs(a22)));
  }
  /// Spectral norm.
  double op_norm() const;
  /// Eigenvalues of the symmetric part, ascending.
  std::array<double, 2> sym_eigenvalues() const;
};

inline double Mat2::op_norm() const {
  // sqrt of the largest eigenvalue of M^T M.
  const Mat2 g = transpose() * (*this);
  const double tr = g.a11 + g.a22;
  const double disc = std::sqrt(std::fmax(0.0, 0.25 * tr * tr - g.det()));
  return std::sqrt(0.5 * tr + disc);
}

inline std::array<double, 2> Mat2::sym_eigenvalues() const {
  const double off = 0.5 * (a12 + a21);
  const double mean = 0.5 * (a11 + a22);
  const double half = 0.5 * (a11 - a22);
  const double rad = std::hypot(half, off);
  return {mean - rad, mean + rad};
}

}  // namespace mhom
