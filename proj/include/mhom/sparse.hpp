#pragma once

#include <cstddef>
#include <vector>

namespace mhom {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> col;
  std::vector<double> val;

  /// Duplicates are summed. The result does not depend on triplet order up to
  /// floating-point summation within one entry, which follows input order.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, const std::vector<Triplet> &triplets);

  std::size_t nnz() const { return val.size(); }
  double at(int r, int c) const;
  std::vector<double> diagonal() const;
  void multiply(const double *x, double *y) const;
  std::vector<double> multiply(const std::vector<double> &x) const;
  /// max |A_ij - A_ji|.
  double symmetry_defect() const;
  /// x^T A x.
  double quadratic_form(const std::vector<double> &x) const;
};

struct CgOptions {
  double rel_tol = 1e-10;
  /// 0 selects ceil(50 sqrt(n)).
  int max_iterations = 0;
  const std::vector<double> *initial_guess = nullptr;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Converged when
/// |b - A x| <= rel_tol |b|. Throws SolverDivergence past the iteration cap.
CgResult pcg(const CsrMatrix &A, const std::vector<double> &b, const CgOptions &opts = {});

}  // namespace mhom
