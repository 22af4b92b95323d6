#include "mhom/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mhom/errors.hpp"
#include "mhom/kernels.hpp"

namespace mhom {

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, const std::vector<Triplet> &triplets) {
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;

  // Bucket by row (stable), then sort each row by column.
  std::vector<int> count(rows + 1, 0);
  for (const auto &t : triplets) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= rows || static_cast<std::size_t>(t.col) >= cols)
      throw std::out_of_range("CsrMatrix::from_triplets: index out of range");
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::pair<int, double>> bucket(triplets.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (const auto &t : triplets) bucket[fill[t.row]++] = {t.col, t.value};

  m.row_ptr.assign(rows + 1, 0);
  m.col.reserve(triplets.size());
  m.val.reserve(triplets.size());
  for (std::size_t r = 0; r < rows; ++r) {
    auto first = bucket.begin() + count[r], last = bucket.begin() + count[r + 1];
    std::stable_sort(first, last, [](const auto &a, const auto &b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (!m.col.empty() && static_cast<int>(m.col.size()) > m.row_ptr[r] && m.col.back() == it->first)
        m.val.back() += it->second;
      else {
        m.col.push_back(it->first);
        m.val.push_back(it->second);
      }
    }
    m.row_ptr[r + 1] = static_cast<int>(m.col.size());
  }
  return m;
}

double CsrMatrix::at(int r, int c) const {
  const auto first = col.begin() + row_ptr[r], last = col.begin() + row_ptr[r + 1];
  const auto it = std::lower_bound(first, last, c);
  return (it != last && *it == c) ? val[it - col.begin()] : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) d[r] = at(static_cast<int>(r), static_cast<int>(r));
  return d;
}

void CsrMatrix::multiply(const double *x, double *y) const {
  kernels::active().spmv(row_ptr.data(), col.data(), val.data(), x, y, rows);
}

std::vector<double> CsrMatrix::multiply(const std::vector<double> &x) const {
  if (x.size() != cols) throw std::invalid_argument("CsrMatrix::multiply: size mismatch");
  std::vector<double> y(rows);
  multiply(x.data(), y.data());
  return y;
}

double CsrMatrix::symmetry_defect() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      worst = std::max(worst, std::fabs(val[k] - at(col[k], static_cast<int>(r))));
  return worst;
}

double CsrMatrix::quadratic_form(const std::vector<double> &x) const {
  const std::vector<double> y = multiply(x);
  return kernels::active().dot(x.data(), y.data(), x.size());
}

CgResult pcg(const CsrMatrix &A, const std::vector<double> &b, const CgOptions &opts) {
  const std::size_t n = A.rows;
  if (A.cols != n || b.size() != n) throw std::invalid_argument("pcg: dimension mismatch");
  const auto &K = kernels::active();

  CgResult res;
  res.x.assign(n, 0.0);
  if (n == 0) return res;
  if (opts.initial_guess) {
    if (opts.initial_guess->size() != n) throw std::invalid_argument("pcg: initial guess has wrong size");
    res.x = *opts.initial_guess;
  }

  std::vector<double> inv_diag = A.diagonal();
  for (double &d : inv_diag) {
    if (!(d > 0.0)) throw SolverDivergence("pcg: matrix has a non-positive diagonal entry");
    d = 1.0 / d;
  }

  const double bnorm = std::sqrt(K.dot(b.data(), b.data(), n));
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    return res;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  const int cap = opts.max_iterations > 0 ? opts.max_iterations
                                          : static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
  int it = 0;
  // The outer loop restarts from the true residual if the recurrence drifted
  // below tolerance while the actual residual did not.
  for (;;) {
    A.multiply(res.x.data(), q.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    double rnorm = std::sqrt(K.dot(r.data(), r.data(), n));
    if (rnorm <= opts.rel_tol * bnorm) {
      res.rel_residual = rnorm / bnorm;
      break;
    }
    K.hadamard(inv_diag.data(), r.data(), z.data(), n);
    p = z;
    double rz = K.dot(r.data(), z.data(), n);
    while (rnorm > opts.rel_tol * bnorm) {
      if (it >= cap)
        throw SolverDivergence("pcg: no convergence after " + std::to_string(cap) +
                               " iterations (relative residual " + std::to_string(rnorm / bnorm) + ")");
      A.multiply(p.data(), q.data());
      const double pq = K.dot(p.data(), q.data(), n);
      if (!(pq > 0.0)) throw SolverDivergence("pcg: matrix is not positive definite");
      const double alpha = rz / pq;
      K.axpy(alpha, p.data(), res.x.data(), n);
      K.axpy(-alpha, q.data(), r.data(), n);
      K.hadamard(inv_diag.data(), r.data(), z.data(), n);
      const double rz_new = K.dot(r.data(), z.data(), n);
      K.xpby(z.data(), rz_new / rz, p.data(), n);
      rz = rz_new;
      rnorm = std::sqrt(K.dot(r.data(), r.data(), n));
      ++it;
    }
  }
  res.iterations = it;
  return res;
}

}  // namespace mhom
