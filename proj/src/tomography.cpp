#include "belltk/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "belltk/error.hpp"

namespace belltk {

int TomographyProblem::local_dim() const { return local_dimension(dim); }

void TomographyProblem::validate() const {
  if (dim < 1) throw ValidationError("TomographyProblem: dimension must be positive");
  local_dimension(dim);
  if (settings.size() != p_measured.size()) {
    throw ValidationError("TomographyProblem: " + std::to_string(settings.size()) + " settings but " +
                          std::to_string(p_measured.size()) + " probabilities");
  }
  if (settings.empty()) throw ValidationError("TomographyProblem: no settings");
  for (std::size_t i = 0; i < p_measured.size(); ++i) {
    const double p = p_measured[i];
    if (std::isnan(p)) throw ValidationError("TomographyProblem: NaN probability at setting " + std::to_string(i));
    if (p < 0.0 || p > 1.0) {
      throw ValidationError("TomographyProblem: probability " + std::to_string(p) + " outside [0, 1] at setting " +
                            std::to_string(i));
    }
  }
}

TomographyProblem problem_from_counts(std::span<const CountRecord> records) {
  if (records.empty()) throw ValidationError("problem_from_counts: no records");
  TomographyProblem problem;
  problem.shots = records.front().shots;
  int d = 0;
  for (const CountRecord& r : records) {
    if (r.shots < 1) throw ValidationError("problem_from_counts: shots must be >= 1");
    if (r.shots != problem.shots) problem.shots = std::min(problem.shots, r.shots);
    d = std::max({d, r.setting.a.k1 + 1, r.setting.a.k2 + 1, r.setting.b.k1 + 1, r.setting.b.k2 + 1});
    problem.settings.push_back(r.setting);
    // Poisson counts may exceed the nominal shots when p is close to 1.
    problem.p_measured.push_back(std::min(r.frequency(), 1.0));
  }
  problem.dim = d * d;
  return problem;
}

TomographyProblem problem_from_probabilities(int dim, std::vector<MeasurementSetting> settings,
                                             std::vector<double> probabilities) {
  TomographyProblem problem{dim, std::move(settings), std::move(probabilities), 0};
  problem.validate();
  return problem;
}

double default_floor(const TomographyProblem& problem) {
  return problem.shots > 0 ? 1.0 / (10.0 * static_cast<double>(problem.shots)) : 1e-5;
}

namespace {

// Hermitian n x n matrices as real vectors (H_ii, Re H_ij, Im H_ij) for
// i < j, row by row. Tr(Pi H) is then a dot product with design_row(Pi).
Eigen::Index coord_count(int n) { return static_cast<Eigen::Index>(n) * n; }

RVector hermitian_coords(const CMatrix& h) {
  const auto n = static_cast<int>(h.rows());
  RVector x(coord_count(n));
  Eigen::Index col = 0;
  for (int i = 0; i < n; ++i) {
    x[col++] = h(i, i).real();
    for (int j = i + 1; j < n; ++j) {
      x[col++] = h(i, j).real();
      x[col++] = h(i, j).imag();
    }
  }
  return x;
}

// Inverse of the pairing g . hermitian_coords(H) = <G, H>_F: off-diagonal
// coordinates of g carry a factor 2.
CMatrix matrix_from_gradient(const RVector& g, int n) {
  CMatrix m(n, n);
  Eigen::Index col = 0;
  for (int i = 0; i < n; ++i) {
    m(i, i) = g[col++];
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = Complex(g[col], g[col + 1]) / 2.0;
      m(j, i) = std::conj(m(i, j));
      col += 2;
    }
  }
  return m;
}

// One row per setting: p_s = design.row(s) . hermitian_coords(rho).
RMatrix design_matrix(std::span<const MeasurementSetting> settings, int dim) {
  const int d = local_dimension(dim);
  RMatrix rows(static_cast<Eigen::Index>(settings.size()), coord_count(dim));
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const CVector v = settings[s].joint_ket(d);
    Eigen::Index col = 0;
    const auto r = static_cast<Eigen::Index>(s);
    for (int i = 0; i < dim; ++i) {
      rows(r, col++) = std::norm(v[i]);
      for (int j = i + 1; j < dim; ++j) {
        // Pi_ji = v_j conj(v_i)
        const Complex pij = v[j] * std::conj(v[i]);
        rows(r, col++) = 2.0 * pij.real();
        rows(r, col++) = -2.0 * pij.imag();
      }
    }
  }
  return rows;
}

int rank_of(const RMatrix& design) {
  Eigen::ColPivHouseholderQR<RMatrix> qr(design);
  qr.setThreshold(1e-10);
  return static_cast<int>(qr.rank());
}

double chi_square_of(const RVector& p_e, const RVector& p_t, double floor) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p_e.size(); ++i) {
    const double diff = p_e[i] - p_t[i];
    total += diff * diff / std::max(p_t[i], floor);
  }
  return total;
}

double weighted_square(const RVector& p_e, const RVector& p_t, const RVector& weights) {
  return ((p_e - p_t).array().square() / weights.array()).sum();
}

}  // namespace

std::vector<double> forward_probabilities(const DensityMatrix& rho, std::span<const MeasurementSetting> settings) {
  const RVector p = design_matrix(settings, rho.dim()) * hermitian_coords(rho.entries());
  return {p.data(), p.data() + p.size()};
}

double chi_square(const DensityMatrix& rho, const TomographyProblem& problem, double floor) {
  if (!(floor > 0.0)) throw ValidationError("chi_square: floor must be positive");
  if (rho.dim() != problem.dim) throw DimensionMismatch("chi_square: state and problem dimensions differ");
  const RVector p_t = design_matrix(problem.settings, problem.dim) * hermitian_coords(rho.entries());
  const RVector p_e = RVector::Map(problem.p_measured.data(), static_cast<Eigen::Index>(problem.p_measured.size()));
  return chi_square_of(p_e, p_t, floor);
}

int measurement_rank(std::span<const MeasurementSetting> settings, int dim) {
  return rank_of(design_matrix(settings, dim));
}

TomographyResult reconstruct(const TomographyProblem& problem, const SolverOptions& opts) {
  problem.validate();
  if (opts.max_iters < 1) throw ValidationError("reconstruct: max_iters must be >= 1");
  if (!(opts.step > 0.0)) throw ValidationError("reconstruct: step must be positive");
  const double floor = opts.floor.value_or(default_floor(problem));
  if (!(floor > 0.0)) throw ValidationError("reconstruct: floor must be positive");

  const int n = problem.dim;
  const RMatrix design = design_matrix(problem.settings, n);
  const int rank = rank_of(design);
  if (rank < n * n) throw IncompleteMeasurement(rank, n * n);

  const RVector p_e = RVector::Map(problem.p_measured.data(), static_cast<Eigen::Index>(problem.p_measured.size()));

  DensityMatrix rho = DensityMatrix::maximally_mixed(n);
  RVector p_t = design * hermitian_coords(rho.entries());
  double chi = chi_square_of(p_e, p_t, floor);
  // chi-square carried by double rounding of the inputs alone
  const double eps = std::numeric_limits<double>::epsilon();
  const double roundoff = static_cast<double>(p_e.size()) * eps * eps / floor;
  double step = opts.step;
  bool converged = false;
  int iter = 0;

  while (iter < opts.max_iters) {
    ++iter;
    const RVector weights = p_t.cwiseMax(floor);
    const RVector coeff = (-2.0 * (p_e - p_t).array() / weights.array()).matrix();
    const RVector grad_coords = design.transpose() * coeff;
    const CMatrix grad = matrix_from_gradient(grad_coords, n);
    const double surrogate = weighted_square(p_e, p_t, weights);

    std::optional<DensityMatrix> candidate;
    RVector candidate_p;
    if (opts.step_rule == StepRule::kConstant) {
      candidate = project_to_state_space(rho.entries() - step * grad);
      candidate_p = design * hermitian_coords(candidate->entries());
    } else {
      double t = step * 2.0;
      while (true) {
        DensityMatrix trial = project_to_state_space(rho.entries() - t * grad);
        const RVector trial_x = hermitian_coords(trial.entries());
        RVector trial_p = design * trial_x;
        const double predicted = grad_coords.dot(trial_x - hermitian_coords(rho.entries()));
        if (weighted_square(p_e, trial_p, weights) <= surrogate + opts.armijo * predicted &&
            chi_square_of(p_e, trial_p, floor) <= chi) {
          candidate = std::move(trial);
          candidate_p = std::move(trial_p);
          step = t;
          break;
        }
        t *= 0.5;
        if (t < 1e-20) break;
      }
      if (!candidate) {
        converged = true;  // no descent direction left on the surrogate
        break;
      }
    }

    const double next_chi = chi_square_of(p_e, candidate_p, floor);
    if (next_chi > chi) {
      // The frozen-denominator step stopped improving the true objective.
      converged = true;
      break;
    }
    const double decrease = chi - next_chi;
    rho = std::move(*candidate);
    p_t = std::move(candidate_p);
    chi = next_chi;
    if (decrease <= opts.tol * chi || chi <= roundoff) {
      converged = true;
      break;
    }
  }

  const double residual = (p_e - p_t).norm();
  return {std::move(rho), chi, iter, converged, residual};
}

}  // namespace belltk
