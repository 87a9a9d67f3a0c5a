#pragma once

#include <span>
#include <vector>

#include "belltk/bellbasis.hpp"
#include "belltk/hilbert.hpp"

namespace belltk {

// Rows: prepared states; columns: reference basis. Entries in [0, 1].
struct OverlapMatrix {
  RMatrix values;

  double mean_diagonal() const;
};

struct CertificationReport {
  BellIndex target;
  double fidelity = 0.0;
  double witness_bound = 0.0;
  bool passes_witness = false;
  int d_ent = 1;
};

// <target|rho|target>
double fidelity(const DensityMatrix& rho, const PureState& target);

OverlapMatrix overlap_matrix(std::span<const DensityMatrix> states, std::span<const PureState> basis);

// Largest fidelity with a maximally entangled d-dimensional state reachable by
// states of Schmidt number at most k - 1: (k - 1) / d.
double witness_bound(int k, int d);

// Largest k in [1, d] with F > (k - 1) / d.
int entanglement_dimensionality(double fidelity, int d);

// I(X;Y) in bits for a uniform prior over the rows; each row is normalized to
// a conditional distribution first.
double mutual_information(const RMatrix& confusion);

CertificationReport certify(const DensityMatrix& rho, const BellIndex& target,
                            BellConvention convention = BellConvention::kMinus);

}  // namespace belltk
