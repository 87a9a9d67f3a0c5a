#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "belltk/hilbert.hpp"

namespace belltk {

// (m, n) label of a d-dimensional Bell state: m selects the correlation class,
// n the relative phase between the d branches.
struct BellIndex {
  int d = 0;
  int m = 0;
  int n = 0;

  BellIndex() = default;
  BellIndex(int d, int m, int n);  // throws ValidationError when out of range

  // Row-major position in a full basis listing.
  int flat() const { return m * d + n; }
  static BellIndex from_flat(int d, int flat);

  friend bool operator==(const BellIndex&, const BellIndex&) = default;
};

// Physical OAM labels of the d encoding levels; level k carries labels()[k].
class ModeWindow {
 public:
  explicit ModeWindow(std::vector<int> labels);

  // Contiguous window starting at -floor((d - 1) / 2); {-1, 0, 1, 2} for d = 4.
  static ModeWindow centered(int d);

  int d() const { return static_cast<int>(labels_.size()); }
  const std::vector<int>& labels() const { return labels_; }
  int label(int k) const { return labels_.at(static_cast<std::size_t>(k)); }
  std::optional<int> index_of(int ell) const;
  bool contiguous() const;

  friend bool operator==(const ModeWindow&, const ModeWindow&) = default;

 private:
  std::vector<int> labels_;
};

enum class BellConvention {
  kPlus,   // |k>_A |m + k mod d>_B
  kMinus,  // |k>_A |m - k mod d>_B
};

std::string_view to_string(BellConvention c);
BellConvention parse_convention(std::string_view text);

// Non-negative residues.
int index_add(int m, int k, int d);
int index_sub(int m, int k, int d);

PureState bell_state_plus(const BellIndex& idx);
PureState bell_state_minus(const BellIndex& idx);
PureState bell_state(const BellIndex& idx, BellConvention convention);

// d^2 states, entry m * d + n holds (m, n).
std::vector<PureState> full_basis(int d, BellConvention convention);

// Occupied (k_A, k_B) pairs of a d*d joint state, A-major order.
std::vector<std::pair<int, int>> occupied_pairs(const PureState& joint, int d,
                                                double threshold = tol::kExact);

// Local dimension of a d*d joint state; throws DimensionMismatch if the
// dimension is not a perfect square.
int local_dimension(int joint_dim);

}  // namespace belltk
