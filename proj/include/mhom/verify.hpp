#pragma once

// Independent oracles: the backward-induction lemma checker and its instance
// generator, a dense direct solver, and the interface surface-integral check.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mhom/geometry.hpp"
#include "mhom/sparse.hpp"

namespace mhom {

struct InductionInstance {
  std::vector<double> E;  // E_1 .. E_n
  double C = 0.0;
  double C1 = 0.0;
  int d = 2;
};

struct InductionBound {
  double beta = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double Cprime = 0.0;
  /// max_k E_k / k^d, the smallest constant that would do.
  double tightest = 0.0;
};

/// Throws HypothesisViolation unless E is nonnegative and nondecreasing,
/// E_n <= C n^d and E_k <= C1 (E_{k+1} - E_k + (k+1)^d) for k < n.
void check_induction_hypotheses(const InductionInstance &inst);

/// Constants from the constructive proof: β = max(2, C/C1), C2 = max(β C1, C),
/// C3 = max over k <= k0 of k^d ((C1 + 1/β)(1 + 1/k)^d - (C1 + 1)), k0 the last k
/// with a positive term (C3 = 0 if there is none), C' = C2 (C3 + 1). Throws
/// HypothesisViolation if the hypotheses fail or if E_k <= C' k^d does not hold.
InductionBound backward_induction_bound(const InductionInstance &inst);

/// Random instance built backwards from E_n; each step takes the largest
/// admissible value with probability `tight`.
InductionInstance generate_instance(std::mt19937_64 &rng, double tight = 0.3);

/// Direct solve by full-pivot LU. Throws SingularMatrix for rank-deficient
/// input and std::invalid_argument above 2000 unknowns.
std::vector<double> dense_solve(const CsrMatrix &A, const std::vector<double> &b);

struct SurfaceCrosscheck {
  double via_formula = 0.0;
  double via_parametric = 0.0;
  double diff = 0.0;
};

/// ∫_{Φ(Γ0)} f dσ computed by pulling back to the reference circle with the
/// normal-gradient factor, and by a polyline on the deformed curve.
SurfaceCrosscheck surface_integral_crosscheck(const DeformationMap &map, const std::function<double(Vec2)> &f,
                                              const InterfaceSpec &spec = {}, int formula_points = 4096,
                                              int polyline_segments = 1 << 20);

}  // namespace mhom
