#pragma once

// Inner loops of the solvers. Every kernel has a serial reference
// implementation and an OpenMP implementation with the same signature; the
// OpenMP versions split work so that each output element is computed by the
// same sequence of floating-point operations as in the serial version, so the
// two agree bitwise.

#include <span>

#include "oemsync/linalg.hpp"

namespace oemsync::kernels {

enum class Exec { serial, parallel };

namespace serial {
/// y += alpha * A x
void spmv(const SparseOperator& a, Complex alpha, std::span<const Complex> x, std::span<Complex> y);
/// Y += alpha * A X
void spmm(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y);
/// Y += alpha * A X^dagger
void spmm_adjoint(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y);
/// M <- M + M^dagger
void add_adjoint_in_place(DenseMatrix& m);
}  // namespace serial

namespace omp {
void spmv(const SparseOperator& a, Complex alpha, std::span<const Complex> x, std::span<Complex> y);
void spmm(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y);
void spmm_adjoint(const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y);
void add_adjoint_in_place(DenseMatrix& m);
}  // namespace omp

inline void spmv(Exec e, const SparseOperator& a, Complex alpha, std::span<const Complex> x, std::span<Complex> y) {
  e == Exec::parallel ? omp::spmv(a, alpha, x, y) : serial::spmv(a, alpha, x, y);
}
inline void spmm(Exec e, const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y) {
  e == Exec::parallel ? omp::spmm(a, alpha, x, y) : serial::spmm(a, alpha, x, y);
}
inline void spmm_adjoint(Exec e, const SparseOperator& a, Complex alpha, const DenseMatrix& x, DenseMatrix& y) {
  e == Exec::parallel ? omp::spmm_adjoint(a, alpha, x, y) : serial::spmm_adjoint(a, alpha, x, y);
}
inline void add_adjoint_in_place(Exec e, DenseMatrix& m) {
  e == Exec::parallel ? omp::add_adjoint_in_place(m) : serial::add_adjoint_in_place(m);
}

/// Number of worker threads the parallel kernels and ensembles may use:
/// omp_get_max_threads(), capped by OEM_SYNC_THREADS when that is set.
int thread_budget();

}  // namespace oemsync::kernels
