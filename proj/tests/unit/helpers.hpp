#pragma once

// Independent dense oracles and seeded generators shared by the unit tests.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oemsync/linalg.hpp"

namespace testing {

using oemsync::Complex;
using oemsync::DenseMatrix;
using oemsync::Index;

inline double max_diff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Dense Kronecker product, written out from the index formula.
inline DenseMatrix dense_kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out = DenseMatrix::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline DenseMatrix dense_annihilation(Index d) {
  DenseMatrix a = DenseMatrix::Zero(d, d);
  for (Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline DenseMatrix dense_pauli(char axis) {
  DenseMatrix m(2, 2);
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// Random sparse matrix with roughly `fill` of the entries set.
inline DenseMatrix random_sparse(std::mt19937_64& rng, Index d, double fill) {
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-1.0, 1.0);
  DenseMatrix m = DenseMatrix::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (u(rng) < fill) m(i, j) = Complex(v(rng), v(rng));
  return m;
}

inline oemsync::Vector random_vector(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> n;
  oemsync::Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = Complex(n(rng), n(rng));
  return v;
}

}  // namespace testing
