#pragma once

// Quadrature rules on the reference triangle and interval.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mhom/types.hpp"

namespace mhom::quad {

/// Barycentric point (l1, l2, l3) and weight; weights sum to 1 (multiply by area).
struct TriPoint {
  double l1, l2, l3, w;
};

/// Degree-5 seven-point rule (Dunavant).
inline const std::array<TriPoint, 7> &triangle7() {
  static const std::array<TriPoint, 7> rule = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
    return std::array<TriPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, w0},
                                    {a1, b1, b1, w1},
                                    {b1, a1, b1, w1},
                                    {b1, b1, a1, w1},
                                    {a2, b2, b2, w2},
                                    {b2, a2, b2, w2},
                                    {b2, b2, a2, w2}}};
  }();
  return rule;
}

inline Vec2 at(const TriPoint &q, Vec2 a, Vec2 b, Vec2 c) { return q.l1 * a + q.l2 * b + q.l3 * c; }

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton on P_n.
inline void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace mhom::quad
