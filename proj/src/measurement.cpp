#include "belltk/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "belltk/error.hpp"

namespace belltk {

ProjectorSpec ProjectorSpec::pure(int k) { return {Kind::kPure, k, 0, 0}; }

ProjectorSpec ProjectorSpec::superposition(int k1, int k2, int quarter) {
  return {Kind::kSuperposition, k1, k2, quarter};
}

double ProjectorSpec::alpha() const { return quarter * std::numbers::pi / 2.0; }

void ProjectorSpec::validate(int d) const {
  if (k1 < 0 || k1 >= d) throw ValidationError("ProjectorSpec: level " + std::to_string(k1) + " outside window");
  if (kind == Kind::kPure) return;
  if (k2 <= k1 || k2 >= d) throw ValidationError("ProjectorSpec: superposition needs k1 < k2 < d");
  if (quarter < 0 || quarter > 3) throw ValidationError("ProjectorSpec: phase must be 0, pi/2, pi or 3pi/2");
}

CVector ProjectorSpec::ket(int d) const {
  validate(d);
  CVector v = CVector::Zero(d);
  if (kind == Kind::kPure) {
    v[k1] = 1.0;
    return v;
  }
  // Exact phases for multiples of pi/2.
  static constexpr Complex kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  v[k1] = std::numbers::sqrt2 / 2.0;
  v[k2] = kPhase[quarter] * (std::numbers::sqrt2 / 2.0);
  return v;
}

CVector MeasurementSetting::joint_ket(int d) const {
  return tensor_product(PureState(a.ket(d)), PureState(b.ket(d))).amplitudes();
}

std::vector<ProjectorSpec> tomography_projectors(int d) {
  if (d < 2) throw ValidationError("tomography_projectors: d must be >= 2");
  std::vector<ProjectorSpec> out;
  for (int k = 0; k < d; ++k) out.push_back(ProjectorSpec::pure(k));
  for (int k1 = 0; k1 < d; ++k1)
    for (int k2 = k1 + 1; k2 < d; ++k2)
      for (int q = 0; q < 4; ++q) out.push_back(ProjectorSpec::superposition(k1, k2, q));
  return out;
}

std::vector<MeasurementSetting> joint_settings(int d) {
  const std::vector<ProjectorSpec> single = tomography_projectors(d);
  std::vector<MeasurementSetting> out;
  out.reserve(single.size() * single.size());
  for (const auto& a : single)
    for (const auto& b : single) out.push_back({a, b});
  return out;
}

double born_probability(const DensityMatrix& rho, const MeasurementSetting& setting) {
  const int d = local_dimension(rho.dim());
  const CVector v = setting.joint_ket(d);
  return v.dot(rho.entries() * v).real();
}

double born_probability(const PureState& joint, const MeasurementSetting& setting) {
  const int d = local_dimension(joint.dim());
  return std::norm(setting.joint_ket(d).dot(joint.amplitudes()));
}

namespace {

// Kraus operators sqrt(w) |to><from| of the single-party mixing channel.
struct Transition {
  int from;
  int to;
  double weight;
};

std::vector<Transition> crosstalk_transitions(int d, double epsilon, CrosstalkEdge edge) {
  std::vector<Transition> out;
  for (int k = 0; k < d; ++k) {
    const bool has_lower = k > 0;
    const bool has_upper = k + 1 < d;
    double lower = epsilon / 2.0;
    double upper = epsilon / 2.0;
    if (edge == CrosstalkEdge::kReflect) {
      if (!has_lower) upper = epsilon;
      if (!has_upper) lower = epsilon;
    }
    if (has_lower) out.push_back({k, k - 1, lower});
    if (has_upper) out.push_back({k, k + 1, upper});
  }
  return out;
}

}  // namespace

DensityMatrix crosstalk_channel(const DensityMatrix& rho, double epsilon, const ModeWindow& window,
                                CrosstalkEdge edge) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw ValidationError("crosstalk_channel: epsilon must lie in [0, 1), got " + std::to_string(epsilon));
  }
  const int d = window.d();
  if (rho.dim() != d * d) throw DimensionMismatch("crosstalk_channel: state is not d^2-dimensional");
  if (epsilon == 0.0) return rho;

  std::vector<CMatrix> kraus;
  kraus.push_back(std::sqrt(1.0 - epsilon) * CMatrix::Identity(d, d));
  for (const Transition& t : crosstalk_transitions(d, epsilon, edge)) {
    CMatrix k = CMatrix::Zero(d, d);
    k(t.to, t.from) = std::sqrt(t.weight);
    kraus.push_back(std::move(k));
  }

  const CMatrix id = CMatrix::Identity(d, d);
  auto apply = [&](const CMatrix& in, bool party_a) {
    CMatrix out = CMatrix::Zero(in.rows(), in.cols());
    for (const CMatrix& k : kraus) {
      const CMatrix full = party_a ? kron(k, id) : kron(id, k);
      out += full * in * full.adjoint();
    }
    return out;
  };
  CMatrix out = apply(apply(rho.entries(), true), false);
  out = 0.5 * (out + out.adjoint()).eval();
  out /= out.trace().real();
  return DensityMatrix(std::move(out));
}

std::uint64_t setting_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed ^ (index * 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                                         std::uint64_t shots_per_setting, std::uint64_t seed) {
  if (shots_per_setting < 1) throw ValidationError("simulate_counts: shots must be >= 1");
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const double p = std::clamp(born_probability(rho, settings[i]), 0.0, 1.0);
    const double mean = p * static_cast<double>(shots_per_setting);
    std::uint64_t counts = 0;
    if (mean > 0.0) {
      std::mt19937_64 rng(setting_seed(seed, i));
      std::poisson_distribution<std::uint64_t> poisson(mean);
      counts = poisson(rng);
    }
    out.push_back({settings[i], counts, shots_per_setting});
  }
  return out;
}

}  // namespace belltk
