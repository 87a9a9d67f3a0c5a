#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "belltk/bellbasis.hpp"
#include "belltk/certify.hpp"
#include "belltk/error.hpp"
#include "belltk/measurement.hpp"
#include "belltk/tomography.hpp"
#include "support.hpp"

using namespace belltk;

namespace {

MeasurementSetting pp(int ka, int kb) { return {ProjectorSpec::pure(ka), ProjectorSpec::pure(kb)}; }

TomographyProblem noiseless(const DensityMatrix& rho) {
  const auto settings = joint_settings(local_dimension(rho.dim()));
  return problem_from_probabilities(rho.dim(), settings, forward_probabilities(rho, settings));
}

void check_feasible(const DensityMatrix& rho) {
  CHECK(rho.min_eigenvalue() >= -1e-9);
  CHECK(std::abs(rho.trace() - 1.0) <= 1e-9);
}

}  // namespace

TEST_CASE("forward probabilities") {
  const auto settings = joint_settings(4);
  const PureState bell = bell_state_minus(BellIndex(4, 0, 0));
  const auto p = forward_probabilities(DensityMatrix::from_pure(bell), settings);
  REQUIRE(p.size() == 784);
  CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-14));
  for (std::size_t i = 0; i < settings.size(); ++i) CHECK(p[i] == doctest::Approx(born_probability(bell, settings[i])));

  for (double v : forward_probabilities(DensityMatrix::maximally_mixed(16), settings)) {
    CHECK(v == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  }

  std::mt19937_64 rng(1);
  const DensityMatrix r1 = testing::random_density(16, rng);
  const DensityMatrix r2 = testing::random_density(16, rng);
  const double w = 0.3;
  const auto mixed = forward_probabilities(r1.mix(r2, w), settings);
  const auto p1 = forward_probabilities(r1, settings);
  const auto p2 = forward_probabilities(r2, settings);
  for (std::size_t i = 0; i < settings.size(); ++i) CHECK(std::abs(mixed[i] - (w * p1[i] + (1 - w) * p2[i])) <= 1e-14);
}

TEST_CASE("chi square examples") {
  const DensityMatrix bell = DensityMatrix::from_pure(bell_state_minus(BellIndex(4, 0, 0)));
  const TomographyProblem exact = noiseless(bell);
  CHECK(chi_square(bell, exact, 1e-5) == 0.0);

  const TomographyProblem half = problem_from_probabilities(16, {pp(0, 0)}, {0.5});
  CHECK(chi_square(bell, half, 1e-5) == doctest::Approx(0.25).epsilon(1e-14));

  const TomographyProblem floored = problem_from_probabilities(16, {pp(0, 1)}, {0.01});
  CHECK(chi_square(bell, floored, 1e-5) == doctest::Approx(10.0).epsilon(1e-10));

  CHECK_THROWS_AS(chi_square(bell, half, 0.0), ValidationError);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(problem_from_probabilities(16, {pp(0, 0)}, {std::numeric_limits<double>::quiet_NaN()}),
                  ValidationError);
  CHECK_THROWS_AS(problem_from_probabilities(16, {pp(0, 0)}, {1.5}), ValidationError);
  CHECK_THROWS_AS(problem_from_probabilities(16, {pp(0, 0)}, {0.1, 0.2}), ValidationError);

  TomographyProblem p = problem_from_probabilities(16, {pp(0, 0)}, {0.1});
  p.p_measured[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(reconstruct(p), ValidationError);

  const std::vector<CountRecord> records{{pp(0, 0), 30, 100}, {pp(0, 1), 5, 200}};
  const TomographyProblem c = problem_from_counts(records);
  CHECK(c.p_measured[0] == doctest::Approx(0.3));
  CHECK(c.p_measured[1] == doctest::Approx(0.025));
  CHECK(c.shots == 100);
  CHECK(default_floor(c) == doctest::Approx(1e-3));
  CHECK(default_floor(problem_from_probabilities(16, {pp(0, 0)}, {0.1})) == doctest::Approx(1e-5));
}

TEST_CASE("measurement rank") {
  CHECK(measurement_rank(joint_settings(4), 16) == 256);
  CHECK(measurement_rank(joint_settings(2), 4) == 16);

  std::vector<MeasurementSetting> pure_only;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) pure_only.push_back(pp(a, b));
  }
  CHECK(measurement_rank(pure_only, 16) == 16);
  const TomographyProblem p = problem_from_probabilities(16, pure_only, std::vector<double>(16, 1.0 / 16));
  try {
    reconstruct(p);
    FAIL("expected IncompleteMeasurement");
  } catch (const IncompleteMeasurement& e) {
    CHECK(e.rank_found() == 16);
    CHECK(e.rank_required() == 256);
  }
}

TEST_CASE("noiseless closed loop") {
  SUBCASE("bell state") {
    const PureState bell = bell_state_minus(BellIndex(4, 0, 0));
    const TomographyResult r = reconstruct(noiseless(DensityMatrix::from_pure(bell)));
    CHECK(fidelity(r.rho, bell) >= 0.999);
    check_feasible(r.rho);
  }
  SUBCASE("maximally mixed") {
    const TomographyResult r = reconstruct(noiseless(DensityMatrix::maximally_mixed(16)));
    CHECK(testing::max_abs(r.rho.entries() - CMatrix::Identity(16, 16) / 16.0) <= 1e-3);
  }
  SUBCASE("random pure states") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      const PureState s = testing::random_pure(16, rng);
      const TomographyResult r = reconstruct(noiseless(DensityMatrix::from_pure(s)));
      CHECK(fidelity(r.rho, s) >= 0.999);
      check_feasible(r.rho);
    }
  }
  SUBCASE("qubit pair") {
    const PureState s = bell_state_plus(BellIndex(2, 1, 1));
    const TomographyResult r = reconstruct(noiseless(DensityMatrix::from_pure(s)));
    CHECK(fidelity(r.rho, s) >= 0.999);
  }
}

TEST_CASE("noisy closed loop at 1e4 shots") {
  const PureState target = bell_state_minus(BellIndex(4, 2, 1));
  const auto records = simulate_counts(DensityMatrix::from_pure(target), joint_settings(4), 10000, 7);
  const TomographyProblem problem = problem_from_counts(records);
  const TomographyResult r = reconstruct(problem);
  CHECK(fidelity(r.rho, target) >= 0.98);
  check_feasible(r.rho);
  const double floor = default_floor(problem);
  CHECK(r.chi_square <= chi_square(DensityMatrix::maximally_mixed(16), problem, floor));
  CHECK(r.chi_square == doctest::Approx(chi_square(r.rho, problem, floor)));
}

TEST_CASE("constant step rule stays feasible") {
  const PureState target = bell_state_minus(BellIndex(4, 1, 0));
  SolverOptions opts;
  opts.step_rule = StepRule::kConstant;
  opts.step = 1e-3;
  opts.max_iters = 50;
  const TomographyResult r = reconstruct(noiseless(DensityMatrix::from_pure(target)), opts);
  check_feasible(r.rho);
  CHECK(r.iterations <= 50);
}

TEST_CASE("iteration cap reports non-convergence") {
  std::mt19937_64 rng(77);
  const PureState s = testing::random_pure(16, rng);
  SolverOptions opts;
  opts.max_iters = 1;
  opts.tol = 0.0;
  const TomographyResult r = reconstruct(noiseless(DensityMatrix::from_pure(s)), opts);
  CHECK_FALSE(r.converged);
  check_feasible(r.rho);
}

TEST_CASE("solution does not depend on setting order") {
  const PureState target = bell_state_minus(BellIndex(4, 3, 2));
  const auto records = simulate_counts(DensityMatrix::from_pure(target), joint_settings(4), 10000, 3);
  const TomographyProblem forward = problem_from_counts(records);

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(5);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<CountRecord> shuffled;
  for (std::size_t i : order) shuffled.push_back(records[i]);
  const TomographyProblem permuted = problem_from_counts(shuffled);

  const double f1 = fidelity(reconstruct(forward).rho, target);
  const double f2 = fidelity(reconstruct(permuted).rho, target);
  CHECK(std::abs(f1 - f2) <= 1e-8);
}
