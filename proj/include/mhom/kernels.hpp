#pragma once

// Vector and CSR kernels used by the CG inner loop.
//
// There is a portable reference implementation and an AVX2/FMA one. The
// variant is picked once at startup from CPU support; MEMBRANE_HOMOG_SIMD=scalar
// (or avx2) overrides the choice. The two variants differ only in summation
// order, so results agree to rounding but are not bit-identical.

#include <cstddef>
#include <string>

namespace mhom::kernels {

struct KernelTable {
  const char *name;
  double (*dot)(const double *x, const double *y, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double *x, double *y, std::size_t n);
  /// y = x + b * y
  void (*xpby)(const double *x, double b, double *y, std::size_t n);
  /// out = a .* b
  void (*hadamard)(const double *a, const double *b, double *out, std::size_t n);
  /// y = A x for a CSR matrix with `rows` rows.
  void (*spmv)(const int *row_ptr, const int *col, const double *val, const double *x, double *y,
               std::size_t rows);
};

const KernelTable &scalar_table();
/// nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable *avx2_table();
/// Table in use for this process.
const KernelTable &active();
/// Forces a variant ("scalar" or "avx2"); returns false if unavailable.
bool select(const std::string &name);

}  // namespace mhom::kernels
