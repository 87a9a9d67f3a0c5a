#pragma once

#include <cstdint>
#include <random>

#include "belltk/hilbert.hpp"

namespace belltk::testing {

inline CMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

inline CMatrix random_hermitian(int dim, std::mt19937_64& rng) {
  const CMatrix a = random_complex(dim, dim, rng);
  return (a + a.adjoint()) / 2.0;
}

inline PureState random_pure(int dim, std::mt19937_64& rng) {
  return PureState(CVector(random_complex(dim, 1, rng).col(0))).normalized();
}

// Ginibre ensemble: G G^dagger / Tr.
inline DensityMatrix random_density(int dim, std::mt19937_64& rng) {
  const CMatrix g = random_complex(dim, dim, rng);
  const CMatrix p = g * g.adjoint();
  return DensityMatrix(p / p.trace().real());
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace belltk::testing
