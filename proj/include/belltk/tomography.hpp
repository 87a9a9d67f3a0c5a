#pragma once

// Density-matrix reconstruction by chi-square minimization over the set of
// unit-trace positive semidefinite matrices.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "belltk/hilbert.hpp"
#include "belltk/measurement.hpp"

namespace belltk {

struct TomographyProblem {
  int dim = 0;  // joint dimension, d*d
  std::vector<MeasurementSetting> settings;
  std::vector<double> p_measured;
  std::uint64_t shots = 0;  // per setting; 0 when the data are exact probabilities

  int local_dim() const;
  void validate() const;
};

TomographyProblem problem_from_counts(std::span<const CountRecord> records);
TomographyProblem problem_from_probabilities(int dim, std::vector<MeasurementSetting> settings,
                                             std::vector<double> probabilities);

enum class StepRule {
  kBacktracking,  // Armijo halving from the previous accepted step
  kConstant,
};

struct SolverOptions {
  int max_iters = 5000;
  StepRule step_rule = StepRule::kBacktracking;
  double step = 1.0;  // initial (backtracking) or fixed (constant) step
  double tol = 1e-10;  // relative chi-square decrease
  std::optional<double> floor;  // default 1 / (10 shots), 1e-5 without shots
  double armijo = 1e-4;
};

struct TomographyResult {
  DensityMatrix rho;
  double chi_square = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;  // || p_measured - p_model ||_2
};

double default_floor(const TomographyProblem& problem);

std::vector<double> forward_probabilities(const DensityMatrix& rho, std::span<const MeasurementSetting> settings);

// sum (p_e - p_t)^2 / max(p_t, floor)
double chi_square(const DensityMatrix& rho, const TomographyProblem& problem, double floor);

// Rank of the linear map rho -> (Tr(rho Pi_i))_i over Hermitian matrices.
int measurement_rank(std::span<const MeasurementSetting> settings, int dim);

// Projected gradient descent started from the maximally mixed state. Each outer
// iteration freezes the denominators max(p_t, floor) at the current iterate,
// takes a gradient step on that quadratic and projects back onto the state
// space. The returned state is always feasible; `converged` reports whether the
// relative decrease criterion was met before max_iters.
TomographyResult reconstruct(const TomographyProblem& problem, const SolverOptions& opts = {});

}  // namespace belltk
