#include "oemsync/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "oemsync/errors.hpp"

namespace oemsync::kernels {

namespace {

void check_vec(const SparseOperator& a, std::size_t nx, std::size_t ny) {
  const auto d = static_cast<std::size_t>(a.dim());
  if (nx != d || ny != d) throw DimensionError("spmv: vector length does not match operator");
}

void check_mat(const SparseOperator& a, const DenseMatrix& x, const DenseMatrix& y) {
  if (x.rows() != a.dim() || x.cols() != a.dim() || y.rows() != a.dim() || y.cols() != a.dim()) {
    throw DimensionError("spmm: matrix shape does not match operator");
  }
}

inline Complex row_dot(const SparseOperator& a, Index r, const Complex* x) {
  const auto rp = a.row_offsets();
  const auto cc = a.columns();
  const auto vv = a.values();
  Complex acc = 0.0;
  for (Index k = rp[r]; k < rp[r + 1]; ++k) acc += vv[k] * x[cc[k]];
  return acc;
}

// sum_k A(r,k) conj(X(j,k)), X column-major
inline Complex row_dot_adjoint(const SparseOperator& a, Index r, const DenseMatrix& x, Index j) {
  const auto rp = a.row_offsets();
  const auto cc = a.columns();
  const auto vv = a.values();
  Complex acc = 0.0;
  for (Index k = rp[r]; k < rp[r + 1]; ++k) acc += vv[k] * std::conj(x(j, cc[k]));
  return acc;
}

inline void spmm_column(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y, Index j) {
  const Complex* xj = x.col(j).data();
  Complex* yj = y.col(j).data();
  for (Index r = 0; r < a.dim(); ++r) yj[r] += alpha * row_dot(a, r, xj);
}

inline void spmm_adjoint_column(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y,
                                Index j) {
  Complex* yj = y.col(j).data();
  for (Index r = 0; r < a.dim(); ++r) yj[r] += alpha * row_dot_adjoint(a, r, x, j);
}

inline void add_adjoint_column(DenseMatrix& m, Index j) {
  for (Index i = 0; i < j; ++i) {
    const Complex upper = m(i, j);
    const Complex lower = m(j, i);
    m(i, j) = upper + std::conj(lower);
    m(j, i) = lower + std::conj(upper);
  }
  m(j, j) = Complex(2.0 * m(j, j).real(), 0.0);
}

}  // namespace

namespace serial {

void spmv(const SparseOperator& a, Complex alpha, std::span<const Complex> x, std::span<Complex> y) {
  check_vec(a, x.size(), y.size());
  for (Index r = 0; r < a.dim(); ++r) y[r] += alpha * row_dot(a, r, x.data());
}

void spmm(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y) {
  check_mat(a, x, y);
  for (Index j = 0; j < x.cols(); ++j) spmm_column(a, alpha, x, y, j);
}

void spmm_adjoint(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y) {
  check_mat(a, x, y);
  for (Index j = 0; j < x.cols(); ++j) spmm_adjoint_column(a, alpha, x, y, j);
}

void add_adjoint_in_place(DenseMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("add_adjoint_in_place: matrix must be square");
  for (Index j = 0; j < m.cols(); ++j) add_adjoint_column(m, j);
}

}  // namespace serial

namespace omp {

void spmv(const SparseOperator& a, Complex alpha, std::span<const Complex> x, std::span<Complex> y) {
  check_vec(a, x.size(), y.size());
  const Index n = a.dim();
  const Complex* xp = x.data();
  Complex* yp = y.data();
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < n; ++r) yp[r] += alpha * row_dot(a, r, xp);
}

void spmm(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y) {
  check_mat(a, x, y);
  const Index n = x.cols();
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) spmm_column(a, alpha, x, y, j);
}

void spmm_adjoint(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y) {
  check_mat(a, x, y);
  const Index n = x.cols();
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) spmm_adjoint_column(a, alpha, x, y, j);
}

void add_adjoint_in_place(DenseMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("add_adjoint_in_place: matrix must be square");
  const Index n = m.cols();
  // column j touches only the (i<j, j) / (j, i<j) pairs, disjoint across columns
#pragma omp parallel for schedule(dynamic, 16)
  for (Index j = 0; j < n; ++j) add_adjoint_column(m, j);
}

}  // namespace omp

int thread_budget() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("OEM_SYNC_THREADS"); env != nullptr && *env != '\0') {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      // unparsable value: ignore the cap
    }
  }
  return std::max(n, 1);
}

}  // namespace oemsync::kernels
