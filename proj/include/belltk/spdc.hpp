#pragma once

// Biphoton OAM spectrum of down-conversion with a structured pump, pump
// engineering for each correlation class, and Procrustean equalization.

#include <map>
#include <vector>

#include "belltk/bellbasis.hpp"
#include "belltk/hilbert.hpp"

namespace belltk {

struct PumpTerm {
  int ell = 0;        // pump OAM L_p
  Complex amplitude;  // C_L

  friend bool operator==(const PumpTerm&, const PumpTerm&) = default;
};

// Normalized superposition of distinct pump OAM components, sorted by ell.
class PumpSpec {
 public:
  explicit PumpSpec(std::vector<PumpTerm> terms);

  const std::vector<PumpTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<PumpTerm> terms_;
};

// Inclusive range of OAM values kept for both photons.
struct EllRange {
  int lo = -5;
  int hi = 5;

  int size() const { return hi - lo + 1; }
  bool contains(int ell) const { return ell >= lo && ell <= hi; }
  int offset(int ell) const { return ell - lo; }

  friend bool operator==(const EllRange&, const EllRange&) = default;
};

enum class SpectrumProfile { kFlat, kGaussian };

class SpdcModel {
 public:
  // c_ell per signal OAM value; values missing from the map are zero.
  SpdcModel(ModeWindow window, EllRange range, std::map<int, double> schmidt_amplitudes);

  static SpdcModel flat(ModeWindow window, EllRange range = {});
  // c_ell proportional to exp(-ell^2 / (2 sigma^2)) across the range.
  static SpdcModel gaussian(ModeWindow window, double sigma, EllRange range = {});

  const ModeWindow& window() const { return window_; }
  const EllRange& range() const { return range_; }
  int d() const { return window_.d(); }
  double amplitude(int ell) const;
  const std::map<int, double>& schmidt_amplitudes() const { return schmidt_; }

  // Relative phase (radians) given to pump component L by pump_recipe.
  double pump_phase(int pump_ell) const;
  SpdcModel with_pump_phases(std::map<int, double> phases) const;

 private:
  ModeWindow window_;
  EllRange range_;
  std::map<int, double> schmidt_;
  std::map<int, double> pump_phases_;
};

// Joint state over range x range, A (signal) major. Pairs whose idler falls
// outside the range are dropped before normalization.
PureState spdc_state(const PumpSpec& pump, const SpdcModel& model);

struct WindowRestriction {
  PureState state;  // d*d, indexed by window level
  double discarded_probability = 0.0;
};

WindowRestriction restrict_to_window(const PureState& joint, const SpdcModel& model);

struct FilterResult {
  PureState state;
  double efficiency = 1.0;  // surviving norm^2 fraction
};

// Attenuates every occupied amplitude of a window-restricted state to the
// smallest occupied magnitude, keeping phases. With a non-empty target_support
// (flat joint indices) every target entry must be occupied.
FilterResult procrustean_filter(const PureState& joint, const SpdcModel& model,
                                const std::vector<int>& target_support = {});

// Pump superposition whose window-restricted output occupies exactly the
// pairs of psi_{m,0} (minus convention).
PumpSpec pump_recipe(int m, const SpdcModel& model);

struct GroupState {
  PumpSpec pump;
  PureState state;  // d*d
  double discarded_probability = 0.0;
  double efficiency = 1.0;
};

GroupState group_state(int m, const SpdcModel& model);

}  // namespace belltk
