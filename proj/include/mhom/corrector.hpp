#pragma once

// Corrector problems: the δ-regularized problem truncated to Φ(offset + Q_n)
// with zero Dirichlet data, and the periodic single-cell problem for Φ = Id.

#include <cstdint>
#include <vector>

#include "mhom/conductivity.hpp"
#include "mhom/fem.hpp"
#include "mhom/geometry.hpp"
#include "mhom/mesh.hpp"

namespace mhom {

struct CorrectorConfig {
  Vec2 p{1.0, 0.0};
  double delta = 1e-3;
  int n = 8;
  int m = 4;
  double h = 0.05;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless 0 < delta <= 1 and 1 <= m <= n-1.
  void validate() const;
};

/// Integrals over one reference cell Y_k of a corrector solution.
struct CellRecord {
  CellIndex k;
  Vec2 flux_plus;    // ∫_{Φ(Y_k+)} A (p + ∇w+)
  Vec2 flux_minus;   // ∫_{Φ(Y_k-)} A (p + ∇w-)
  double energy_ref = 0.0;  // reference-configuration |∇w̃|^2 + δ w̃^2 + jump^2 over Y_k
  double jump_sq = 0.0;     // physical ∫_{Φ(Γ_k)} (w+ - w-)^2
};

struct CorrectorSolution {
  Vec2 p;
  double delta = 0.0;
  int n = 0;
  CellIndex offset;
  FemSolution fem;
  /// Row-major over the (2n)^2 cells offset + [-n, n)^2.
  std::vector<CellRecord> cells;

  const CellRecord &cell(CellIndex k) const;
  /// Mean over the window offset + Q_m of (F+, F-), per unit reference cell.
  std::pair<Vec2, Vec2> window_flux(int m) const;
  double max_abs() const;
};

/// Mesh and free-dof matrix for one (map, A, n, δ, offset); reusable across p.
class TruncatedProblem {
 public:
  TruncatedProblem(const CellMesh &cell, const DeformationMap &map, const Conductivity &A, int n, double delta,
                   CellIndex offset = {}, bool membranes = true);
  TruncatedProblem(const TruncatedProblem &) = delete;
  TruncatedProblem &operator=(const TruncatedProblem &) = delete;

  const MembraneMesh &mesh() const { return mesh_; }
  const DiscreteSystem &system() const { return sys_; }
  const DeformationMap &map() const { return map_; }
  CorrectorSolution solve(Vec2 p, const CgOptions &opts = {}) const;

 private:
  DeformationMap map_;
  Conductivity A_;
  int n_;
  double delta_;
  CellIndex offset_;
  MembraneMesh mesh_;
  DiscreteSystem sys_;
  std::vector<double> load_e1_, load_e2_;
};

/// Convenience wrapper building the cell mesh from cfg.h.
CorrectorSolution solve_truncated(const CorrectorConfig &cfg, const DeformationMap &map, const Conductivity &A,
                                  const InterfaceSpec &spec = {});

/// Cumulative E_k over offset + Q_k, k = 1..n.
std::vector<double> energy_profile(const CorrectorSolution &sol);

/// s_n = max |w| / n for each solution.
std::vector<double> sublinearity_diagnostic(const std::vector<CorrectorSolution> &sols);

/// δ schedule used with the sublinearity diagnostic.
inline double sublinearity_delta(int n) { return 0.1 / (static_cast<double>(n) * n); }

/// Periodic unit-cell solution (Φ = Id): opposite sides identified, γ = 1,
/// δ = 0, PLUS-region mean removed.
struct PeriodicSolution {
  Vec2 p;
  FemSolution fem;
  MembraneMesh mesh;        // the cell mesh the solution lives on
  std::vector<int> node_to_dof;
  Vec2 flux_plus, flux_minus;
  double jump_sq = 0.0;
  double plus_mean = 0.0;   // PLUS-region mean after the gauge (0 up to rounding)

  Vec2 flux() const { return flux_plus + flux_minus; }
};

PeriodicSolution periodic_cell_solve(Vec2 p, const CellMesh &cell, const Conductivity &A, const CgOptions &opts = {});
PeriodicSolution periodic_cell_solve(Vec2 p, const InterfaceSpec &spec, const Conductivity &A, double h);

/// Node -> dof map merging opposite sides (and all four corners) of a cell mesh.
std::vector<int> periodic_dof_map(const CellMesh &cell);

/// Effective tensor of the periodic cell, columns A0 e_i = flux(e_i).
Mat2 periodic_tensor(const CellMesh &cell, const Conductivity &A);

struct RichardsonResult {
  double value = 0.0;
  double order = 0.0;
  std::vector<double> levels;
};

/// Extrapolates a quantity computed at h, h/2, h/4. The observed order is
/// clamped to [1, 3]; with two levels order 2 is assumed.
RichardsonResult richardson(const std::vector<double> &levels);

}  // namespace mhom
