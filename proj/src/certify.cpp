#include "belltk/certify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "belltk/error.hpp"

namespace belltk {

double OverlapMatrix::mean_diagonal() const {
  if (values.rows() == 0) throw ValidationError("OverlapMatrix: empty");
  return values.diagonal().mean();
}

double fidelity(const DensityMatrix& rho, const PureState& target) {
  if (rho.dim() != target.dim()) {
    throw DimensionMismatch("fidelity: state dim " + std::to_string(rho.dim()) + " vs target dim " +
                            std::to_string(target.dim()));
  }
  const CVector& t = target.amplitudes();
  return std::clamp(t.dot(rho.entries() * t).real(), 0.0, 1.0);
}

OverlapMatrix overlap_matrix(std::span<const DensityMatrix> states, std::span<const PureState> basis) {
  if (states.size() != basis.size()) {
    throw ValidationError("overlap_matrix: " + std::to_string(states.size()) + " states vs " +
                          std::to_string(basis.size()) + " basis elements");
  }
  const auto n = static_cast<Eigen::Index>(states.size());
  OverlapMatrix out{RMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out.values(i, j) = fidelity(states[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
  return out;
}

double witness_bound(int k, int d) {
  if (d < 1 || k < 1 || k > d) {
    throw ValidationError("witness_bound: need 1 <= k <= d, got k=" + std::to_string(k) + ", d=" + std::to_string(d));
  }
  return static_cast<double>(k - 1) / static_cast<double>(d);
}

int entanglement_dimensionality(double fidelity, int d) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw ValidationError("entanglement_dimensionality: F outside [0, 1]");
  if (d < 1) throw ValidationError("entanglement_dimensionality: d must be >= 1");
  int best = 1;
  for (int k = 1; k <= d; ++k) {
    if (fidelity > witness_bound(k, d)) best = k;
  }
  return best;
}

double mutual_information(const RMatrix& confusion) {
  if (confusion.rows() == 0 || confusion.cols() == 0) throw ValidationError("mutual_information: empty matrix");
  if ((confusion.array() < 0.0).any() || !confusion.allFinite()) {
    throw ValidationError("mutual_information: entries must be finite and non-negative");
  }
  const Eigen::Index rows = confusion.rows();
  RMatrix conditional = confusion;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double total = conditional.row(i).sum();
    if (!(total > 0.0)) throw ValidationError("mutual_information: row " + std::to_string(i) + " sums to zero");
    conditional.row(i) /= total;
  }
  const double prior = 1.0 / static_cast<double>(rows);
  const RVector marginal = conditional.colwise().sum().transpose() * prior;
  double info = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < conditional.cols(); ++j) {
      const double p = conditional(i, j);
      if (p > 0.0) info += prior * p * std::log2(p / marginal[j]);
    }
  }
  return std::max(info, 0.0);
}

CertificationReport certify(const DensityMatrix& rho, const BellIndex& target, BellConvention convention) {
  const PureState ideal = bell_state(target, convention);
  CertificationReport report;
  report.target = target;
  report.fidelity = fidelity(rho, ideal);
  report.witness_bound = witness_bound(target.d, target.d);
  report.passes_witness = report.fidelity > report.witness_bound;
  report.d_ent = entanglement_dimensionality(report.fidelity, target.d);
  return report;
}

}  // namespace belltk
