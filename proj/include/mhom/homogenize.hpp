#pragma once

// ε-problem on D = (0,1)^2, the homogenized problem, and the error measures
// comparing them.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mhom/conductivity.hpp"
#include "mhom/fem.hpp"
#include "mhom/geometry.hpp"
#include "mhom/mesh.hpp"

namespace mhom {

enum class SourcePreset { One, Tilted, Zero };
std::string to_string(SourcePreset s);
std::optional<SourcePreset> parse_source(const std::string &name);
/// 1, 1 + x1 + 2 x2, or 0.
std::function<double(Vec2)> source_function(SourcePreset s);

struct HeteroSolution {
  double eps = 0.0;
  MembraneMesh mesh;
  FemSolution fem;
};

/// γ = 1/ε transmission problem with u = 0 on ∂D.
HeteroSolution solve_hetero(const CellMesh &cell, const DeformationMap &map, double eps,
                            const std::function<double(Vec2)> &f, const Conductivity &A,
                            MembraneRule rule = MembraneRule::Distance);

/// Constant-coefficient Dirichlet solve on the structured mesh of (0,1)^2.
class HomogSolution {
 public:
  HomogSolution() = default;
  HomogSolution(Mat2 A0, int n, std::vector<double> values);

  const Mat2 &A0() const { return A0_; }
  int n() const { return n_; }
  const std::vector<double> &values() const { return values_; }
  /// P1 interpolant; throws MeshMismatch outside the closed unit square.
  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;

 private:
  int locate(Vec2 x, int &i, int &j) const;  // triangle slot 0..3 within square (i, j)
  Mat2 A0_;
  int n_ = 0;
  std::vector<double> values_;
};

HomogSolution solve_homog(const Mat2 &A0, const std::function<double(Vec2)> &f, int n = 128);

/// b = (x1 (1-x1) x2 (1-x2))^2 and the fixed test families.
double bubble(Vec2 x);
std::array<std::function<double(Vec2)>, 4> scalar_tests();
std::array<std::function<Vec2(Vec2)>, 3> vector_tests();

struct ConvergenceRow {
  std::uint64_t seed = 0;
  double eps = 0.0;
  double l2_error = 0.0;
  double jump_l2 = 0.0;
  double jump_over_sqrt_eps = 0.0;
  std::array<double, 3> flux_res{};
  std::array<double, 4> mass_res{};
  double grad_plus = 0.0;
  double grad_minus = 0.0;
  double f_l2 = 0.0;

  double energy_ratio() const { return (grad_plus + grad_minus) / f_l2; }
};

/// Residuals below this fraction of the absolute pairing count as exact zeros.
constexpr double kPairingFloor = 1e-10;

ConvergenceRow error_suite(const HeteroSolution &ue, const HomogSolution &u0, const Conductivity &A, double theta,
                           const std::function<double(Vec2)> &f);

struct RateFit {
  double exponent = 0.0;
  double r2 = 0.0;
};

/// Least-squares slope of log(error) against log(eps). Needs >= 3 points;
/// throws DegenerateFit if any error <= 1e-14.
RateFit rate_fit(const std::vector<double> &eps, const std::vector<double> &errors);

}  // namespace mhom
