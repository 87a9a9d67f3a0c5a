#include "belltk/gates.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "belltk/error.hpp"

namespace belltk {

std::string_view to_string(Party p) { return p == Party::kA ? "A" : "B"; }

Party parse_party(std::string_view text) {
  if (text == "A" || text == "a" || text == "signal") return Party::kA;
  if (text == "B" || text == "b" || text == "idler") return Party::kB;
  throw ValidationError("unknown party '" + std::string(text) + "'");
}

Operator dove_prism(double alpha, const ModeWindow& window) {
  const int d = window.d();
  CMatrix g = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) g(k, k) = std::polar(1.0, 2.0 * window.label(k) * alpha);
  return Operator(std::move(g));
}

Operator pauli_z(int d, int n) {
  if (d < 2 || n < 0 || n >= d) throw ValidationError("pauli_z: need d >= 2 and 0 <= n < d");
  CMatrix g = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    g(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((n * k) % d) / d);
  }
  return Operator(std::move(g));
}

Operator pauli_x(int d) {
  if (d < 2) throw ValidationError("pauli_x: d must be >= 2");
  CMatrix g = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) g(index_add(k, 1, d), k) = 1.0;
  return Operator(std::move(g));
}

PureState apply_local(const Operator& g, Party party, const PureState& joint) {
  const int d = g.dim();
  if (joint.dim() != d * d) {
    throw DimensionMismatch("apply_local: gate dim " + std::to_string(d) + " incompatible with joint dim " +
                            std::to_string(joint.dim()));
  }
  // View the A-major joint vector as a d x d matrix psi(a, b); then
  // (g x I) psi = g * psi and (I x g) psi = psi * g^T.
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> psi(joint.amplitudes().data(), d, d);
  RowMajor out = party == Party::kA ? RowMajor(g.entries() * psi) : RowMajor(psi * g.entries().transpose());
  return PureState(CVector::Map(out.data(), d * d));
}

bool equal_up_to_global_phase(const PureState& a, const PureState& b, double tolerance) {
  if (a.dim() != b.dim()) throw DimensionMismatch("equal_up_to_global_phase: dimension mismatch");
  return std::abs(inner_product(a, b)) >= 1.0 - tolerance;
}

double dove_angle_for_phase_class(int n, int d, Party party) {
  if (d < 2 || n < 0 || n >= d) throw ValidationError("dove_angle_for_phase_class: need 0 <= n < d");
  const double alpha = std::numbers::pi * n / d;
  return party == Party::kA ? alpha : -alpha;
}

}  // namespace belltk
