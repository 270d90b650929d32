#include "oemsync/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oemsync/errors.hpp"

namespace oemsync {

SpaceConfig SpaceConfig::make(Index n_mech, Index n_cav) {
  if (n_mech < 2 || n_cav < 2) {
    throw DimensionError("Fock truncations must be >= 2, got n_mech=" + std::to_string(n_mech) +
                         " n_cav=" + std::to_string(n_cav));
  }
  return SpaceConfig{2, n_mech, n_cav};
}

SpaceConfig SpaceConfig::qubit_mech(Index n_mech) {
  if (n_mech < 2) throw DimensionError("n_mech must be >= 2, got " + std::to_string(n_mech));
  return SpaceConfig{2, n_mech, 1};
}

Index SpaceConfig::slot_dim(Slot s) const {
  switch (s) {
    case Slot::qubit: return n_qubit;
    case Slot::mech: return n_mech;
    case Slot::cav: return n_cav;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// SparseOperator

SparseOperator SparseOperator::from_entries(Index dim, std::vector<Entry> entries) {
  if (dim < 0) throw DimensionError("negative operator dimension");
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim) {
      throw DimensionError("entry (" + std::to_string(e.row) + "," + std::to_string(e.col) +
                           ") outside dimension " + std::to_string(dim));
    }
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
      throw InvariantError("non-finite operator entry");
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseOperator op;
  op.dim_ = dim;
  op.row_ptr_.assign(static_cast<std::size_t>(dim) + 1, 0);
  op.col_.reserve(entries.size());
  op.values_.reserve(entries.size());

  std::size_t i = 0;
  while (i < entries.size()) {
    const Index r = entries[i].row;
    const Index c = entries[i].col;
    Complex sum = 0.0;
    while (i < entries.size() && entries[i].row == r && entries[i].col == c) sum += entries[i++].value;
    if (sum == Complex(0.0)) continue;
    op.col_.push_back(c);
    op.values_.push_back(sum);
    ++op.row_ptr_[static_cast<std::size_t>(r) + 1];
  }
  for (Index r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
  return op;
}

SparseOperator SparseOperator::identity(Index dim) {
  std::vector<Entry> e;
  e.reserve(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) e.push_back({k, k, 1.0});
  return from_entries(dim, std::move(e));
}

SparseOperator SparseOperator::zero(Index dim) { return from_entries(dim, {}); }

SparseOperator SparseOperator::from_dense(const DenseMatrix& m, double drop_below) {
  if (m.rows() != m.cols()) throw DimensionError("from_dense needs a square matrix");
  std::vector<Entry> e;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      if (std::abs(m(r, c)) > drop_below) e.push_back({r, c, m(r, c)});
  return from_entries(m.rows(), std::move(e));
}

Complex SparseOperator::at(Index row, Index col) const {
  if (row < 0 || row >= dim_ || col < 0 || col >= dim_) throw DimensionError("at(): index out of range");
  const auto first = col_.begin() + row_ptr_[row];
  const auto last = col_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_.begin())];
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
  std::vector<Entry> out;
  out.reserve(values_.size());
  for (Index r = 0; r < dim_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_[k], values_[k]});
  return out;
}

DenseMatrix SparseOperator::to_dense() const {
  DenseMatrix m = DenseMatrix::Zero(dim_, dim_);
  for (Index r = 0; r < dim_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m(r, col_[k]) = values_[k];
  return m;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseOperator::hermiticity_defect() const {
  double m = 0.0;
  for (Index r = 0; r < dim_; ++r)
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      m = std::max(m, std::abs(values_[k] - std::conj(at(col_[k], r))));
  // structurally absent mirrors are covered from the present side
  return m;
}

Vector SparseOperator::apply(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("apply(): vector size mismatch");
  Vector y(dim_);
  for (Index r = 0; r < dim_; ++r) {
    Complex acc = 0.0;
    for (Index k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * x[col_[k]];
    y[r] = acc;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Elementary operators

SparseOperator annihilation(Index d) {
  if (d < 2) throw DimensionError("annihilation operator needs d >= 2, got " + std::to_string(d));
  std::vector<SparseOperator::Entry> e;
  for (Index n = 1; n < d; ++n) e.push_back({n - 1, n, std::sqrt(static_cast<double>(n))});
  return SparseOperator::from_entries(d, std::move(e));
}

SparseOperator creation(Index d) { return dagger(annihilation(d)); }

SparseOperator number(Index d) {
  if (d < 1) throw DimensionError("number operator needs d >= 1");
  std::vector<SparseOperator::Entry> e;
  for (Index n = 1; n < d; ++n) e.push_back({n, n, static_cast<double>(n)});
  return SparseOperator::from_entries(d, std::move(e));
}

SparseOperator pauli(Axis axis) {
  switch (axis) {
    case Axis::x: return SparseOperator::from_entries(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    case Axis::y: return SparseOperator::from_entries(2, {{0, 1, -kI}, {1, 0, kI}});
    case Axis::z: return SparseOperator::from_entries(2, {{0, 0, 1.0}, {1, 1, -1.0}});
  }
  return {};
}

// ---------------------------------------------------------------------------
// Algebra

SparseOperator kron(const SparseOperator& a, const SparseOperator& b) {
  const Index db = b.dim();
  std::vector<SparseOperator::Entry> e;
  e.reserve(static_cast<std::size_t>(a.nnz() * b.nnz()));
  for (const auto& ea : a.entries())
    for (const auto& eb : b.entries()) e.push_back({ea.row * db + eb.row, ea.col * db + eb.col, ea.value * eb.value});
  return SparseOperator::from_entries(a.dim() * db, std::move(e));
}

SparseOperator embed(const SparseOperator& op, Slot slot, const SpaceConfig& space) {
  if (op.dim() != space.slot_dim(slot)) {
    throw DimensionError("embed(): operator dim " + std::to_string(op.dim()) + " does not match slot dim " +
                         std::to_string(space.slot_dim(slot)));
  }
  const auto id = [](Index d) { return SparseOperator::identity(d); };
  switch (slot) {
    case Slot::qubit: return kron(op, id(space.n_mech * space.n_cav));
    case Slot::mech: return kron(kron(id(space.n_qubit), op), id(space.n_cav));
    case Slot::cav: return kron(id(space.n_qubit * space.n_mech), op);
  }
  return {};
}

namespace {
void require_same_dim(const SparseOperator& a, const SparseOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}
}  // namespace

SparseOperator add(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "add");
  auto e = a.entries();
  auto eb = b.entries();
  e.insert(e.end(), eb.begin(), eb.end());
  return SparseOperator::from_entries(a.dim(), std::move(e));
}

SparseOperator scale(const SparseOperator& a, Complex s) {
  auto e = a.entries();
  for (auto& x : e) x.value *= s;
  return SparseOperator::from_entries(a.dim(), std::move(e));
}

SparseOperator matmul(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "matmul");
  const auto ar = a.row_offsets();
  const auto ac = a.columns();
  const auto av = a.values();
  const auto br = b.row_offsets();
  const auto bc = b.columns();
  const auto bv = b.values();
  std::vector<SparseOperator::Entry> e;
  for (Index r = 0; r < a.dim(); ++r)
    for (Index k = ar[r]; k < ar[r + 1]; ++k) {
      const Index mid = ac[k];
      for (Index j = br[mid]; j < br[mid + 1]; ++j) e.push_back({r, bc[j], av[k] * bv[j]});
    }
  return SparseOperator::from_entries(a.dim(), std::move(e));
}

SparseOperator dagger(const SparseOperator& a) {
  auto e = a.entries();
  for (auto& x : e) {
    std::swap(x.row, x.col);
    x.value = std::conj(x.value);
  }
  return SparseOperator::from_entries(a.dim(), std::move(e));
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// States

PureState::PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  for (Index k = 0; k < amplitudes_.size(); ++k) {
    if (!std::isfinite(amplitudes_[k].real()) || !std::isfinite(amplitudes_[k].imag())) {
      throw InvariantError("non-finite state amplitude");
    }
  }
  if (norm_squared() > 1.0 + 1e-9) throw InvariantError("state norm^2 exceeds 1");
}

PureState PureState::product(const SpaceConfig& space, Complex c0, Complex c1, Index mech_fock, Index cav_fock) {
  if (mech_fock < 0 || mech_fock >= space.n_mech || cav_fock < 0 || cav_fock >= space.n_cav) {
    throw DimensionError("Fock index outside truncation");
  }
  const double n = std::sqrt(std::norm(c0) + std::norm(c1));
  if (n == 0.0) throw InvariantError("qubit amplitudes are both zero");
  Vector v = Vector::Zero(space.total_dim());
  v[space.index(0, mech_fock, cav_fock)] = c0 / n;
  v[space.index(1, mech_fock, cav_fock)] = c1 / n;
  return PureState(std::move(v));
}

PureState PureState::basis(Index dim, Index k) {
  if (k < 0 || k >= dim) throw DimensionError("basis index out of range");
  Vector v = Vector::Zero(dim);
  v[k] = 1.0;
  return PureState(std::move(v));
}

bool PureState::is_normalized(double tol) const { return std::abs(norm_squared() - 1.0) <= tol; }

DensityMatrix::DensityMatrix(DenseMatrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() != matrix_.cols()) throw DimensionError("density matrix must be square");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const DenseMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  if (hermiticity_defect() > 1e-10) throw InvariantError("density matrix is not Hermitian");
  if (std::abs(trace() - Complex(1.0)) > 1e-8) throw InvariantError("density matrix trace differs from 1");
  if (dim() <= 64 && min_eigenvalue() < -1e-8) throw InvariantError("density matrix has a negative eigenvalue");
}

// ---------------------------------------------------------------------------
// Expectation values

Complex expect(const SparseOperator& op, const Vector& psi) {
  if (psi.size() != op.dim()) throw DimensionError("expect(): state dimension mismatch");
  const auto rp = op.row_offsets();
  const auto cc = op.columns();
  const auto vv = op.values();
  Complex acc = 0.0;
  for (Index r = 0; r < op.dim(); ++r) {
    Complex row = 0.0;
    for (Index k = rp[r]; k < rp[r + 1]; ++k) row += vv[k] * psi[cc[k]];
    acc += std::conj(psi[r]) * row;
  }
  return acc / psi.squaredNorm();
}

Complex expect(const SparseOperator& op, const PureState& psi) { return expect(op, psi.amplitudes()); }

Complex expect(const SparseOperator& op, const DenseMatrix& rho) {
  if (rho.rows() != op.dim() || rho.cols() != op.dim()) throw DimensionError("expect(): density dimension mismatch");
  // tr(O rho) = sum_{r,c} O(r,c) rho(c,r)
  const auto rp = op.row_offsets();
  const auto cc = op.columns();
  const auto vv = op.values();
  Complex acc = 0.0;
  for (Index r = 0; r < op.dim(); ++r)
    for (Index k = rp[r]; k < rp[r + 1]; ++k) acc += vv[k] * rho(cc[k], r);
  return acc;
}

Complex expect(const SparseOperator& op, const DensityMatrix& rho) { return expect(op, rho.matrix()); }

}  // namespace oemsync
