#include "belltk/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "belltk/error.hpp"

namespace belltk {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch(std::string(what) + ": expected a non-empty square matrix, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw ValidationError("PureState: dimension must be positive");
}

PureState::PureState(std::initializer_list<Complex> amplitudes)
    : PureState(CVector::Map(amplitudes.begin(), static_cast<Eigen::Index>(amplitudes.size()))) {}

PureState PureState::basis(int dim, int k) {
  if (dim < 1 || k < 0 || k >= dim) {
    throw ValidationError("PureState::basis: index " + std::to_string(k) + " outside [0, " +
                          std::to_string(dim) + ")");
  }
  CVector v = CVector::Zero(dim);
  v[k] = 1.0;
  return PureState(std::move(v));
}

PureState PureState::normalized() const {
  const double n = norm();
  if (n == 0.0 || !std::isfinite(n)) throw ValidationError("PureState: cannot normalize a zero vector");
  return PureState(amplitudes_ / n);
}

PureState PureState::scaled(Complex factor) const { return PureState(amplitudes_ * factor); }

CMatrix PureState::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

Operator::Operator(CMatrix entries) : entries_(std::move(entries)) { require_square(entries_, "Operator"); }

Operator Operator::identity(int dim) { return Operator(CMatrix::Identity(dim, dim)); }

bool Operator::is_unitary(double tolerance) const {
  const CMatrix residual = entries_.adjoint() * entries_ - CMatrix::Identity(dim(), dim());
  return residual.cwiseAbs().maxCoeff() <= tolerance;
}

Operator Operator::operator*(const Operator& rhs) const {
  if (dim() != rhs.dim()) throw DimensionMismatch("Operator product: dimension mismatch");
  return Operator(entries_ * rhs.entries_);
}

PureState Operator::apply(const PureState& state) const {
  if (dim() != state.dim()) {
    throw DimensionMismatch("Operator::apply: operator dim " + std::to_string(dim()) +
                            " vs state dim " + std::to_string(state.dim()));
  }
  return PureState(entries_ * state.amplitudes());
}

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "DensityMatrix");
  if (!entries_.allFinite()) throw ValidationError("DensityMatrix: non-finite entries");
  const double herm = hermiticity_error(entries_);
  if (herm > tol::kHermitian) {
    throw ValidationError("DensityMatrix: not Hermitian (max deviation " + std::to_string(herm) + ")");
  }
  if (std::abs(trace() - 1.0) > tol::kIterative) {
    throw ValidationError("DensityMatrix: trace " + std::to_string(trace()) + " differs from 1");
  }
  const double lmin = min_eigenvalue();
  if (lmin < -tol::kIterative) {
    throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& state) {
  return DensityMatrix(state.normalized().projector());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw ValidationError("DensityMatrix::maximally_mixed: dimension must be positive");
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::min_eigenvalue() const {
  const CMatrix sym = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::mix(const DensityMatrix& other, double w) const {
  if (dim() != other.dim()) throw DimensionMismatch("DensityMatrix::mix: dimension mismatch");
  if (w < 0.0 || w > 1.0) throw ValidationError("DensityMatrix::mix: weight outside [0, 1]");
  return DensityMatrix(w * entries_ + (1.0 - w) * other.entries_);
}

PureState tensor_product(const PureState& a, const PureState& b) {
  const int na = a.dim();
  const int nb = b.dim();
  CVector out(static_cast<Eigen::Index>(na) * nb);
  for (int i = 0; i < na; ++i) {
    out.segment(static_cast<Eigen::Index>(i) * nb, nb) = a[i] * b.amplitudes();
  }
  return PureState(std::move(out));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Complex inner_product(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("inner_product: dims " + std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()));
  }
  return a.amplitudes().dot(b.amplitudes());  // Eigen conjugates the left operand
}

double hermiticity_error(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("hermiticity_error: matrix is not square");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

EigenDecomposition hermitian_eigendecomposition(const CMatrix& m) {
  require_square(m, "hermitian_eigendecomposition");
  const double herm = hermiticity_error(m);
  if (!(herm <= tol::kHermitianInput)) {
    throw ValidationError("hermitian_eigendecomposition: input not Hermitian (deviation " +
                          std::to_string(herm) + ")");
  }
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigendecomposition: eigensolver did not converge");
  }
  // Eigen sorts ascending; reverse to descending.
  const Eigen::Index n = sym.rows();
  EigenDecomposition out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

std::vector<double> project_to_simplex(std::span<const double> values) {
  if (values.empty()) throw ValidationError("project_to_simplex: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) shift = candidate;
  }
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [shift](double v) { return std::max(v - shift, 0.0); });
  // Clipping leaves the sum at 1 up to rounding; renormalize exactly.
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= total;
  return out;
}

DensityMatrix project_to_state_space(const CMatrix& m) {
  require_square(m, "project_to_state_space");
  if (m.cwiseAbs().maxCoeff() == 0.0) {
    throw ValidationError("project_to_state_space: all-zero input is degenerate");
  }
  const EigenDecomposition eig = hermitian_eigendecomposition(m);
  const std::vector<double> clipped = project_to_simplex(
      std::span<const double>(eig.values.data(), static_cast<std::size_t>(eig.values.size())));
  const RVector weights = RVector::Map(clipped.data(), static_cast<Eigen::Index>(clipped.size()));
  CMatrix rho = eig.vectors * weights.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, bool keep_a) {
  if (m.rows() != static_cast<Eigen::Index>(dim_a) * dim_b || m.cols() != m.rows()) {
    throw DimensionMismatch("partial_trace: matrix size does not match dim_a * dim_b");
  }
  if (keep_a) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k) out(i, j) += m(i * dim_b + k, j * dim_b + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k) out(i, j) += m(k * dim_b + i, k * dim_b + j);
  return out;
}

}  // namespace belltk
