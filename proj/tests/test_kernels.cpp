#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "mhom/kernels.hpp"
#include "mhom/sparse.hpp"

using namespace mhom;

namespace {

std::vector<double> random_vec(std::mt19937_64 &rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto &x : v) x = u(rng);
  return v;
}

CsrMatrix random_csr(std::mt19937_64 &rng, std::size_t n, int per_row) {
  std::uniform_int_distribution<int> col(0, static_cast<int>(n) - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < n; ++r) {
    const int k = static_cast<int>(r % (per_row + 1));  // ragged rows, some empty
    for (int i = 0; i < k; ++i) t.push_back({static_cast<int>(r), col(rng), u(rng)});
  }
  return CsrMatrix::from_triplets(n, n, t);
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 100, 1001};

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree") {
  const kernels::KernelTable *simd = kernels::avx2_table();
  if (!simd) {
    MESSAGE("AVX2 not available on this machine; equivalence test skipped");
    return;
  }
  const kernels::KernelTable &ref = kernels::scalar_table();
  std::mt19937_64 rng(1);
  for (std::size_t n : kSizes) {
    INFO("n = " << n);
    const auto x = random_vec(rng, n), y = random_vec(rng, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
    CHECK(std::abs(ref.dot(x.data(), y.data(), n) - simd->dot(x.data(), y.data(), n)) <= 1e-14 * (scale + 1.0));

    auto y1 = y, y2 = y;
    ref.axpy(0.37, x.data(), y1.data(), n);
    simd->axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

    y1 = y;
    y2 = y;
    ref.xpby(x.data(), -1.3, y1.data(), n);
    simd->xpby(x.data(), -1.3, y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

    std::vector<double> h1(n), h2(n);
    ref.hadamard(x.data(), y.data(), h1.data(), n);
    simd->hadamard(x.data(), y.data(), h2.data(), n);
    CHECK(h1 == h2);

    if (n > 0) {
      const CsrMatrix A = random_csr(rng, n, 9);
      std::vector<double> s1(n), s2(n);
      ref.spmv(A.row_ptr.data(), A.col.data(), A.val.data(), x.data(), s1.data(), n);
      simd->spmv(A.row_ptr.data(), A.col.data(), A.val.data(), x.data(), s2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(s1[i] - s2[i]) <= 1e-14);
    }
  }
}

TEST_CASE("kernel selection") {
  CHECK(kernels::select("scalar"));
  CHECK(std::string(kernels::active().name) == "scalar");
  CHECK_FALSE(kernels::select("no-such-kernel"));
  if (kernels::avx2_table()) {
    CHECK(kernels::select("avx2"));
    CHECK(std::string(kernels::active().name) == "avx2");
  }
}

TEST_CASE("PCG gives the same answer under both kernel sets") {
  // 1D Laplacian plus a small shift.
  const std::size_t n = 300;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({int(i), int(i), 2.01});
    if (i > 0) t.push_back({int(i), int(i - 1), -1.0});
    if (i + 1 < n) t.push_back({int(i), int(i + 1), -1.0});
  }
  const CsrMatrix A = CsrMatrix::from_triplets(n, n, t);
  std::mt19937_64 rng(2);
  const auto b = random_vec(rng, n);
  kernels::select("scalar");
  const CgResult r1 = pcg(A, b);
  if (kernels::avx2_table()) kernels::select("avx2");
  const CgResult r2 = pcg(A, b);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r1.x[i] - r2.x[i]) <= 1e-8);
  CHECK(r1.rel_residual <= 1e-10);
  CHECK(r2.rel_residual <= 1e-10);
}

TEST_CASE("CSR assembly sums duplicates") {
  const CsrMatrix A = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 2.0}, {0, 0, 3.0}, {0, 1, -1.0}});
  CHECK(A.at(0, 0) == 4.0);
  CHECK(A.at(0, 1) == -1.0);
  CHECK(A.at(1, 0) == 2.0);
  CHECK(A.at(1, 1) == 0.0);
  CHECK(A.nnz() == 3);
}
