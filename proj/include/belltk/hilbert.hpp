#pragma once

// Dense complex linear algebra for the small Hilbert spaces used throughout
// the toolkit (at most a few hundred dimensions, typically 16).
//
// Joint two-party indices are A-major: amplitude (i, j) lives at i * dim_b + j.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace belltk {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

namespace tol {
inline constexpr double kExact = 1e-12;
inline constexpr double kIterative = 1e-9;
inline constexpr double kHermitian = 1e-10;
inline constexpr double kHermitianInput = 1e-8;
}  // namespace tol

class PureState {
 public:
  explicit PureState(CVector amplitudes);
  PureState(std::initializer_list<Complex> amplitudes);

  static PureState basis(int dim, int k);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const CVector& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_[i]; }

  double norm() const { return amplitudes_.norm(); }
  // Throws ValidationError on a zero vector.
  PureState normalized() const;
  PureState scaled(Complex factor) const;

  // |psi><psi|, unnormalized if the state is.
  CMatrix projector() const;

 private:
  CVector amplitudes_;
};

class Operator {
 public:
  explicit Operator(CMatrix entries);

  static Operator identity(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& entries() const { return entries_; }

  bool is_unitary(double tolerance = tol::kHermitian) const;
  Operator operator*(const Operator& rhs) const;
  PureState apply(const PureState& state) const;

 private:
  CMatrix entries_;
};

// Hermitian, unit-trace, positive semidefinite. Construction validates.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);

  static DensityMatrix from_pure(const PureState& state);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& entries() const { return entries_; }
  Complex operator()(int i, int j) const { return entries_(i, j); }

  double trace() const { return entries_.trace().real(); }
  double min_eigenvalue() const;

  // Convex combination w * this + (1 - w) * other.
  DensityMatrix mix(const DensityMatrix& other, double w) const;

 private:
  CMatrix entries_;
};

struct EigenDecomposition {
  RVector values;   // descending
  CMatrix vectors;  // columns are eigenvectors
};

PureState tensor_product(const PureState& a, const PureState& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);
Complex inner_product(const PureState& a, const PureState& b);

double hermiticity_error(const CMatrix& m);

// Symmetrizes as (M + M^dagger) / 2 before solving. Throws ValidationError if
// the input is not Hermitian within tol::kHermitianInput and NumericalError if
// the solver does not converge.
EigenDecomposition hermitian_eigendecomposition(const CMatrix& m);

// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
std::vector<double> project_to_simplex(std::span<const double> values);

// Nearest unit-trace PSD matrix in Frobenius norm.
DensityMatrix project_to_state_space(const CMatrix& m);

// Partial trace over party B (keep_a) or party A of a dim_a * dim_b operator.
CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, bool keep_a);

}  // namespace belltk
