#pragma once

// Sparse complex operators on the truncated qubit (x) mechanics (x) cavity space.
//
// Conventions used everywhere in the project:
//   * subsystem ordering is qubit (x) mech (x) cav, so the composite index of
//     |s, m, c> is (s * n_mech + m) * n_cav + c;
//   * sigma_z |0> = +|0>, sigma_z |1> = -|1>;
//   * all arithmetic is std::complex<double>.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oemsync {

using Complex = std::complex<double>;
using Index = std::ptrdiff_t;
using Vector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class Slot { qubit, mech, cav };
enum class Axis { x, y, z };

struct SpaceConfig {
  Index n_qubit = 2;
  Index n_mech = 2;
  Index n_cav = 2;

  /// Full hybrid space. Both bosonic truncations must be at least 2.
  static SpaceConfig make(Index n_mech, Index n_cav);
  /// Qubit + mechanics only; the cavity slot is a trivial one-dimensional factor.
  static SpaceConfig qubit_mech(Index n_mech);

  Index total_dim() const { return n_qubit * n_mech * n_cav; }
  Index slot_dim(Slot s) const;
  Index index(Index qubit, Index mech, Index cav) const { return (qubit * n_mech + mech) * n_cav + cav; }
  bool has_cavity() const { return n_cav > 1; }

  friend bool operator==(const SpaceConfig&, const SpaceConfig&) = default;
};

/// Compressed-row complex matrix. Immutable once built; duplicate coordinates
/// are summed on construction and exact zeros dropped.
class SparseOperator {
 public:
  struct Entry {
    Index row;
    Index col;
    Complex value;
  };

  SparseOperator() = default;

  static SparseOperator from_entries(Index dim, std::vector<Entry> entries);
  static SparseOperator identity(Index dim);
  static SparseOperator zero(Index dim);
  static SparseOperator from_dense(const DenseMatrix& m, double drop_below = 0.0);

  Index dim() const { return dim_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_offsets() const { return row_ptr_; }
  std::span<const Index> columns() const { return col_; }
  std::span<const Complex> values() const { return values_; }

  Complex at(Index row, Index col) const;
  std::vector<Entry> entries() const;
  DenseMatrix to_dense() const;

  double max_abs() const;
  /// max |O - O^dagger| over all entries.
  double hermiticity_defect() const;

  /// y = O x
  Vector apply(const Vector& x) const;

 private:
  Index dim_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_;
  std::vector<Complex> values_;
};

SparseOperator annihilation(Index d);
SparseOperator creation(Index d);
SparseOperator number(Index d);
SparseOperator pauli(Axis axis);

SparseOperator kron(const SparseOperator& a, const SparseOperator& b);
SparseOperator embed(const SparseOperator& op, Slot slot, const SpaceConfig& space);

SparseOperator add(const SparseOperator& a, const SparseOperator& b);
SparseOperator scale(const SparseOperator& a, Complex s);
SparseOperator matmul(const SparseOperator& a, const SparseOperator& b);
SparseOperator dagger(const SparseOperator& a);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

inline SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) { return add(a, b); }
inline SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return add(a, scale(b, -1.0)); }
inline SparseOperator operator*(Complex s, const SparseOperator& a) { return scale(a, s); }
inline SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) { return matmul(a, b); }

class PureState {
 public:
  PureState() = default;
  explicit PureState(Vector amplitudes);

  /// Product state |qubit> (x) |mech_fock> (x) |cav_fock>; the qubit amplitudes are normalized.
  static PureState product(const SpaceConfig& space, Complex c0, Complex c1, Index mech_fock, Index cav_fock);
  static PureState basis(Index dim, Index k);

  Index dim() const { return amplitudes_.size(); }
  double norm_squared() const { return amplitudes_.squaredNorm(); }
  bool is_normalized(double tol = 1e-9) const;

  const Vector& amplitudes() const { return amplitudes_; }

 private:
  Vector amplitudes_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(DenseMatrix m);
  static DensityMatrix from_pure(const PureState& psi);

  Index dim() const { return matrix_.rows(); }
  Complex trace() const { return matrix_.trace(); }
  double hermiticity_defect() const;
  /// Smallest eigenvalue of the Hermitian part. Dense; only for small dims.
  double min_eigenvalue() const;

  /// Throws InvariantError unless Hermitian to 1e-10, unit trace to 1e-8, and
  /// (for dims <= 64) min eigenvalue >= -1e-8.
  void validate() const;

  const DenseMatrix& matrix() const { return matrix_; }

 private:
  DenseMatrix matrix_;
};

Complex expect(const SparseOperator& op, const PureState& psi);
Complex expect(const SparseOperator& op, const Vector& psi);  // <psi|O|psi> / <psi|psi>
Complex expect(const SparseOperator& op, const DensityMatrix& rho);
Complex expect(const SparseOperator& op, const DenseMatrix& rho);

}  // namespace oemsync
