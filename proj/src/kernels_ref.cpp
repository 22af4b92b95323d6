#include "mhom/kernels.hpp"

namespace mhom::kernels {

namespace {

double dot_ref(const double *x, const double *y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_ref(double a, const double *x, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby_ref(const double *x, double b, double *y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void hadamard_ref(const double *a, const double *b, double *out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void spmv_ref(const int *row_ptr, const int *col, const double *val, const double *x, double *y, std::size_t rows) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable &scalar_table() {
  static const KernelTable table{"scalar", dot_ref, axpy_ref, xpby_ref, hadamard_ref, spmv_ref};
  return table;
}

}  // namespace mhom::kernels
