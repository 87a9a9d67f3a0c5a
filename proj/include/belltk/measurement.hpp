#pragma once

// Tomographic projector sets, Born-rule probabilities and emulated
// coincidence counts with adjacent-mode crosstalk.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "belltk/bellbasis.hpp"
#include "belltk/hilbert.hpp"

namespace belltk {

// Single-party projector onto |k> or (|k1> + exp(i alpha)|k2>)/sqrt(2) with
// alpha = quarter * pi / 2.
struct ProjectorSpec {
  enum class Kind { kPure, kSuperposition };

  Kind kind = Kind::kPure;
  int k1 = 0;
  int k2 = 0;       // superposition only, k1 < k2
  int quarter = 0;  // superposition only, 0..3

  static ProjectorSpec pure(int k);
  static ProjectorSpec superposition(int k1, int k2, int quarter);

  double alpha() const;
  void validate(int d) const;
  CVector ket(int d) const;

  friend bool operator==(const ProjectorSpec&, const ProjectorSpec&) = default;
};

struct MeasurementSetting {
  ProjectorSpec a;
  ProjectorSpec b;

  CVector joint_ket(int d) const;  // ket_a x ket_b

  friend bool operator==(const MeasurementSetting&, const MeasurementSetting&) = default;
};

struct CountRecord {
  MeasurementSetting setting;
  std::uint64_t counts = 0;
  std::uint64_t shots = 1;

  double frequency() const { return static_cast<double>(counts) / static_cast<double>(shots); }

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

// d pure projectors (ascending), then every pair k1 < k2 lexicographically
// with alpha ascending: d + 4 * C(d, 2) entries.
std::vector<ProjectorSpec> tomography_projectors(int d);

// Cartesian product, projector_A major.
std::vector<MeasurementSetting> joint_settings(int d);

double born_probability(const DensityMatrix& rho, const MeasurementSetting& setting);
double born_probability(const PureState& joint, const MeasurementSetting& setting);

enum class CrosstalkEdge {
  kReflect,  // edge levels send their full epsilon to the single neighbour
  kLeak,     // half of epsilon leaves the window at the edges; output renormalized
};

// Incoherent adjacent-level mixing applied independently to both parties.
DensityMatrix crosstalk_channel(const DensityMatrix& rho, double epsilon, const ModeWindow& window,
                                CrosstalkEdge edge = CrosstalkEdge::kReflect);

// Sub-seed for setting `index`: splitmix64 finalizer applied to
// seed ^ (index * 0x9E3779B97F4A7C15).
std::uint64_t setting_seed(std::uint64_t seed, std::uint64_t index);

// counts ~ Poisson(shots * p) with p the Born probability; each setting draws
// from its own generator seeded by setting_seed(seed, index).
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                         std::uint64_t shots_per_setting, std::uint64_t seed);

}  // namespace belltk
