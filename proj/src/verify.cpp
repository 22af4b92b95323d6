#include "mhom/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mhom/errors.hpp"

namespace mhom {

namespace {

constexpr double kSlack = 1e-12;

bool leq(double a, double b) { return a <= b + kSlack * std::max({1.0, std::fabs(a), std::fabs(b)}); }

}  // namespace

void check_induction_hypotheses(const InductionInstance &inst) {
  const auto &E = inst.E;
  const int n = static_cast<int>(E.size());
  if (n < 1) throw HypothesisViolation("backward induction: empty sequence");
  if (!(inst.C > 0.0) || !(inst.C1 > 0.0) || inst.d < 1) throw HypothesisViolation("backward induction: C, C1 and d must be positive");
  const double d = inst.d;
  for (int k = 1; k <= n; ++k) {
    if (!(E[k - 1] >= 0.0)) throw HypothesisViolation("backward induction: negative E_" + std::to_string(k));
    if (k < n && E[k - 1] > E[k]) throw HypothesisViolation("backward induction: sequence decreases at k=" + std::to_string(k));
  }
  if (!leq(E[n - 1], inst.C * std::pow(n, d))) throw HypothesisViolation("backward induction: E_n > C n^d");
  for (int k = 1; k < n; ++k)
    if (!leq(E[k - 1], inst.C1 * (E[k] - E[k - 1] + std::pow(k + 1, d))))
      throw HypothesisViolation("backward induction: recursion fails at k=" + std::to_string(k));
}

InductionBound backward_induction_bound(const InductionInstance &inst) {
  check_induction_hypotheses(inst);
  const double d = inst.d;
  InductionBound b;
  b.beta = std::max(2.0, inst.C / inst.C1);
  b.C2 = std::max(b.beta * inst.C1, inst.C);  // βC1 can round below C when β = C/C1
  const int n = static_cast<int>(inst.E.size());
  // The bracket is positive exactly for k <= k0(C1, β); C3 does not depend on n.
  for (int k = 1; k < 10000000; ++k) {
    const double term = std::pow(k, d) * ((inst.C1 + 1.0 / b.beta) * std::pow(1.0 + 1.0 / k, d) - (inst.C1 + 1.0));
    if (term <= 0.0) break;
    b.C3 = std::max(b.C3, term);
  }
  b.Cprime = b.C2 * (b.C3 + 1.0);
  for (int k = 1; k <= n; ++k) {
    const double kd = std::pow(k, d);
    b.tightest = std::max(b.tightest, inst.E[k - 1] / kd);
    if (!leq(inst.E[k - 1], b.Cprime * kd))
      throw HypothesisViolation("backward induction: conclusion fails at k=" + std::to_string(k));
  }
  return b;
}

InductionInstance generate_instance(std::mt19937_64 &rng, double tight) {
  std::uniform_int_distribution<int> len(2, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  InductionInstance inst;
  inst.d = 2;
  const int n = len(rng);
  inst.C1 = std::exp(std::log(0.05) + unit(rng) * std::log(400.0));  // log-uniform on [0.05, 20]
  inst.C = std::exp(std::log(0.05) + unit(rng) * std::log(400.0));
  inst.E.assign(n, 0.0);
  const double nd = std::pow(n, 2.0);
  inst.E[n - 1] = unit(rng) < tight ? inst.C * nd : inst.C * nd * unit(rng);
  for (int k = n - 1; k >= 1; --k) {
    const double next = inst.E[k];
    const double kp = std::pow(k + 1, 2.0);
    const double upper = std::min(next, inst.C1 * (next + kp) / (1.0 + inst.C1));
    inst.E[k - 1] = unit(rng) < tight ? upper : upper * (0.5 + 0.5 * unit(rng));
  }
  check_induction_hypotheses(inst);
  return inst;
}

std::vector<double> dense_solve(const CsrMatrix &A, const std::vector<double> &b) {
  const std::size_t n = A.rows;
  if (A.cols != n || b.size() != n) throw std::invalid_argument("dense_solve: dimension mismatch");
  if (n > 2000) throw std::invalid_argument("dense_solve: more than 2000 unknowns");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) M(static_cast<Eigen::Index>(r), A.col[k]) = A.val[k];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (lu.rank() < static_cast<Eigen::Index>(n)) throw SingularMatrix("dense_solve: matrix is singular");
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd x = lu.solve(rhs);
  return std::vector<double>(x.data(), x.data() + x.size());
}

SurfaceCrosscheck surface_integral_crosscheck(const DeformationMap &map, const std::function<double(Vec2)> &f,
                                              const InterfaceSpec &spec, int formula_points, int polyline_segments) {
  const double r = spec.radius;
  const double two_pi = 2.0 * std::numbers::pi;
  SurfaceCrosscheck out;

  // Pullback: trapezoid in the angle is spectrally accurate for periodic data.
  double sum = 0.0;
  for (int i = 0; i < formula_points; ++i) {
    const double t = two_pi * i / formula_points;
    const Vec2 normal{std::cos(t), std::sin(t)};
    const Vec2 y = spec.center + r * normal;
    sum += f(map.apply(y)) * map.surface_factor_normal_form(y, normal);
  }
  out.via_formula = sum * r * two_pi / formula_points;

  // Polyline on the deformed curve, f at chord midpoints.
  double poly = 0.0;
  Vec2 prev = map.apply(spec.center + Vec2{r, 0.0});
  const Vec2 first = prev;
  for (int i = 1; i <= polyline_segments; ++i) {
    const double t = two_pi * i / polyline_segments;
    const Vec2 cur = i == polyline_segments ? first : map.apply(spec.center + r * Vec2{std::cos(t), std::sin(t)});
    poly += norm(cur - prev) * f(0.5 * (prev + cur));
    prev = cur;
  }
  out.via_parametric = poly;
  out.diff = std::fabs(out.via_formula - out.via_parametric);
  return out;
}

}  // namespace mhom
