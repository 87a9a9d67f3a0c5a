#pragma once

#include <stdexcept>
#include <string>

namespace belltk {

// Input data violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// An iterative kernel failed to produce a usable answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The measurement settings do not determine a density matrix uniquely.
class IncompleteMeasurement : public ValidationError {
 public:
  IncompleteMeasurement(int rank_found, int rank_required)
      : ValidationError("measurement map is informationally incomplete: rank " +
                        std::to_string(rank_found) + " of " +
                        std::to_string(rank_required)),
        rank_found_(rank_found),
        rank_required_(rank_required) {}

  int rank_found() const { return rank_found_; }
  int rank_required() const { return rank_required_; }

 private:
  int rank_found_;
  int rank_required_;
};

}  // namespace belltk
