#include "belltk/bellbasis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "belltk/error.hpp"

namespace belltk {

BellIndex::BellIndex(int d, int m, int n) : d(d), m(m), n(n) {
  if (d < 2) throw ValidationError("BellIndex: dimension must be >= 2, got " + std::to_string(d));
  if (m < 0 || m >= d || n < 0 || n >= d) {
    throw ValidationError("BellIndex: (m, n) = (" + std::to_string(m) + ", " + std::to_string(n) +
                          ") outside [0, " + std::to_string(d) + ")");
  }
}

BellIndex BellIndex::from_flat(int d, int flat) {
  if (d < 2 || flat < 0 || flat >= d * d) throw ValidationError("BellIndex::from_flat: out of range");
  return BellIndex(d, flat / d, flat % d);
}

ModeWindow::ModeWindow(std::vector<int> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) throw ValidationError("ModeWindow: need at least two labels");
  const std::set<int> unique(labels_.begin(), labels_.end());
  if (unique.size() != labels_.size()) throw ValidationError("ModeWindow: labels must be distinct");
}

ModeWindow ModeWindow::centered(int d) {
  if (d < 2) throw ValidationError("ModeWindow::centered: dimension must be >= 2");
  std::vector<int> labels(static_cast<std::size_t>(d));
  const int start = -((d - 1) / 2);
  for (int k = 0; k < d; ++k) labels[static_cast<std::size_t>(k)] = start + k;
  return ModeWindow(std::move(labels));
}

std::optional<int> ModeWindow::index_of(int ell) const {
  const auto it = std::find(labels_.begin(), labels_.end(), ell);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

bool ModeWindow::contiguous() const {
  for (std::size_t k = 1; k < labels_.size(); ++k) {
    if (labels_[k] != labels_[k - 1] + 1) return false;
  }
  return true;
}

std::string_view to_string(BellConvention c) { return c == BellConvention::kPlus ? "plus" : "minus"; }

BellConvention parse_convention(std::string_view text) {
  if (text == "plus") return BellConvention::kPlus;
  if (text == "minus") return BellConvention::kMinus;
  throw ValidationError("unknown Bell convention '" + std::string(text) + "'");
}

int index_add(int m, int k, int d) {
  if (d < 2) throw ValidationError("index_add: d must be >= 2");
  const int r = (m + k) % d;
  return r < 0 ? r + d : r;
}

int index_sub(int m, int k, int d) {
  if (d < 2) throw ValidationError("index_sub: d must be >= 2");
  const int r = (m - k) % d;
  return r < 0 ? r + d : r;
}

namespace {

PureState build_bell(const BellIndex& idx, bool plus) {
  const int d = idx.d;
  CVector amps = CVector::Zero(d * d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    // Reduce n*k first so the phase argument stays in [0, 2 pi).
    const double angle = 2.0 * std::numbers::pi * static_cast<double>((idx.n * k) % d) / d;
    const int partner = plus ? index_add(idx.m, k, d) : index_sub(idx.m, k, d);
    amps[k * d + partner] = std::polar(norm, angle);
  }
  return PureState(std::move(amps));
}

}  // namespace

PureState bell_state_plus(const BellIndex& idx) { return build_bell(BellIndex(idx.d, idx.m, idx.n), true); }

PureState bell_state_minus(const BellIndex& idx) {
  return build_bell(BellIndex(idx.d, idx.m, idx.n), false);
}

PureState bell_state(const BellIndex& idx, BellConvention convention) {
  return convention == BellConvention::kPlus ? bell_state_plus(idx) : bell_state_minus(idx);
}

std::vector<PureState> full_basis(int d, BellConvention convention) {
  if (d < 2) throw ValidationError("full_basis: d must be >= 2, got " + std::to_string(d));
  std::vector<PureState> out;
  out.reserve(static_cast<std::size_t>(d * d));
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) out.push_back(bell_state(BellIndex(d, m, n), convention));
  return out;
}

std::vector<std::pair<int, int>> occupied_pairs(const PureState& joint, int d, double threshold) {
  if (joint.dim() != d * d) throw DimensionMismatch("occupied_pairs: joint dim is not d^2");
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < d * d; ++i) {
    if (std::abs(joint[i]) > threshold) out.emplace_back(i / d, i % d);
  }
  return out;
}

int local_dimension(int joint_dim) {
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(joint_dim))));
  if (d * d != joint_dim || d < 1) {
    throw DimensionMismatch("joint dimension " + std::to_string(joint_dim) + " is not a perfect square");
  }
  return d;
}

}  // namespace belltk
