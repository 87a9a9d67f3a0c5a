#include "belltk/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "belltk/error.hpp"

namespace belltk {

namespace {

constexpr double kOccupied = 1e-12;  // relative to the largest magnitude

}  // namespace

PumpSpec::PumpSpec(std::vector<PumpTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ValidationError("PumpSpec: no terms");
  std::sort(terms_.begin(), terms_.end(), [](const PumpTerm& a, const PumpTerm& b) { return a.ell < b.ell; });
  double total = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && terms_[i].ell == terms_[i - 1].ell) {
      throw ValidationError("PumpSpec: duplicate pump OAM " + std::to_string(terms_[i].ell));
    }
    total += std::norm(terms_[i].amplitude);
  }
  if (std::abs(total - 1.0) > tol::kExact) {
    throw ValidationError("PumpSpec: sum |C_L|^2 = " + std::to_string(total) + ", expected 1");
  }
}

SpdcModel::SpdcModel(ModeWindow window, EllRange range, std::map<int, double> schmidt_amplitudes)
    : window_(std::move(window)), range_(range), schmidt_(std::move(schmidt_amplitudes)) {
  if (range_.lo > range_.hi) throw ValidationError("SpdcModel: empty ell range");
  for (int ell : window_.labels()) {
    if (!range_.contains(ell)) {
      throw ValidationError("SpdcModel: window label " + std::to_string(ell) + " outside ell range");
    }
  }
  for (const auto& [ell, c] : schmidt_) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ValidationError("SpdcModel: c_ell must be finite and non-negative (ell=" + std::to_string(ell) + ")");
    }
  }
}

SpdcModel SpdcModel::flat(ModeWindow window, EllRange range) {
  std::map<int, double> c;
  for (int ell = range.lo; ell <= range.hi; ++ell) c[ell] = 1.0;
  return SpdcModel(std::move(window), range, std::move(c));
}

SpdcModel SpdcModel::gaussian(ModeWindow window, double sigma, EllRange range) {
  if (!(sigma > 0.0)) throw ValidationError("SpdcModel::gaussian: sigma must be positive");
  std::map<int, double> c;
  for (int ell = range.lo; ell <= range.hi; ++ell) {
    c[ell] = std::exp(-static_cast<double>(ell * ell) / (2.0 * sigma * sigma));
  }
  return SpdcModel(std::move(window), range, std::move(c));
}

double SpdcModel::amplitude(int ell) const {
  const auto it = schmidt_.find(ell);
  return it == schmidt_.end() ? 0.0 : it->second;
}

double SpdcModel::pump_phase(int pump_ell) const {
  const auto it = pump_phases_.find(pump_ell);
  return it == pump_phases_.end() ? 0.0 : it->second;
}

SpdcModel SpdcModel::with_pump_phases(std::map<int, double> phases) const {
  SpdcModel copy = *this;
  copy.pump_phases_ = std::move(phases);
  return copy;
}

PureState spdc_state(const PumpSpec& pump, const SpdcModel& model) {
  const EllRange& r = model.range();
  const int n = r.size();
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(n) * n);
  for (const PumpTerm& term : pump.terms()) {
    for (int ell = r.lo; ell <= r.hi; ++ell) {
      const int idler = term.ell - ell;
      if (!r.contains(idler)) continue;
      amps[r.offset(ell) * n + r.offset(idler)] += term.amplitude * model.amplitude(ell);
    }
  }
  if (amps.norm() == 0.0) throw ValidationError("spdc_state: pump and spectrum produce no pairs");
  return PureState(amps).normalized();
}

WindowRestriction restrict_to_window(const PureState& joint, const SpdcModel& model) {
  const EllRange& r = model.range();
  const int n = r.size();
  if (joint.dim() != n * n) {
    throw DimensionMismatch("restrict_to_window: joint dim " + std::to_string(joint.dim()) +
                            " does not match ell range size^2 " + std::to_string(n * n));
  }
  const ModeWindow& w = model.window();
  const int d = w.d();
  CVector kept = CVector::Zero(d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      kept[a * d + b] = joint[r.offset(w.label(a)) * n + r.offset(w.label(b))];
    }
  }
  const double total = joint.amplitudes().squaredNorm();
  const double surviving = kept.squaredNorm();
  if (surviving == 0.0) throw ValidationError("restrict_to_window: no probability inside the window");
  return {PureState(kept / std::sqrt(surviving)), 1.0 - surviving / total};
}

FilterResult procrustean_filter(const PureState& joint, const SpdcModel& model,
                                const std::vector<int>& target_support) {
  const int d = model.d();
  if (joint.dim() != d * d) throw DimensionMismatch("procrustean_filter: joint dim is not d^2");
  const CVector& a = joint.amplitudes();
  const double largest = a.cwiseAbs().maxCoeff();
  if (largest == 0.0) throw ValidationError("procrustean_filter: empty state");
  const double threshold = kOccupied * largest;

  for (int idx : target_support) {
    if (idx < 0 || idx >= d * d) throw ValidationError("procrustean_filter: target index out of range");
    if (std::abs(a[idx]) <= threshold) {
      throw ValidationError("procrustean_filter: target pair (" + std::to_string(idx / d) + ", " +
                            std::to_string(idx % d) + ") has zero amplitude and cannot be equalized");
    }
  }

  double smallest = largest;
  for (int k = 0; k < d; ++k) {
    int occupied_in_row = 0;
    for (int j = 0; j < d; ++j) {
      const double mag = std::abs(a[k * d + j]);
      if (mag > threshold) {
        ++occupied_in_row;
        smallest = std::min(smallest, mag);
      }
    }
    if (occupied_in_row > 1) {
      throw ValidationError("procrustean_filter: signal level " + std::to_string(k) +
                            " has more than one occupied partner");
    }
  }

  CVector out = CVector::Zero(d * d);
  for (int i = 0; i < d * d; ++i) {
    const double mag = std::abs(a[i]);
    if (mag > threshold) out[i] = a[i] * (smallest / mag);
  }
  const double efficiency = out.squaredNorm() / a.squaredNorm();
  return {PureState(out).normalized(), efficiency};
}

PumpSpec pump_recipe(int m, const SpdcModel& model) {
  const ModeWindow& w = model.window();
  const int d = w.d();
  if (m < 0 || m >= d) {
    throw ValidationError("pump_recipe: m = " + std::to_string(m) + " outside [0, " + std::to_string(d) + ")");
  }

  // Target pairs of psi_{m,0} grouped by their total OAM, which fixes the pump
  // component that can produce them.
  std::map<int, std::vector<int>> signal_by_pump;
  std::set<std::pair<int, int>> target;
  for (int k = 0; k < d; ++k) {
    const int partner = index_sub(m, k, d);
    target.emplace(k, partner);
    signal_by_pump[w.label(k) + w.label(partner)].push_back(w.label(k));
  }

  // Each pump component must not populate in-window pairs outside the target.
  for (const auto& [pump_ell, signals] : signal_by_pump) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        if (w.label(a) + w.label(b) == pump_ell && !target.contains({a, b})) {
          throw ValidationError("pump_recipe: window is not compatible with pump engineering (pump " +
                                std::to_string(pump_ell) + " also populates (" + std::to_string(a) +
                                ", " + std::to_string(b) + "))");
        }
      }
    }
  }

  // C_L proportional to 1 / min c over the group equalizes the smallest
  // amplitude of every group; the filter removes what is left.
  std::vector<PumpTerm> terms;
  double total = 0.0;
  for (const auto& [pump_ell, signals] : signal_by_pump) {
    double weakest = std::numeric_limits<double>::infinity();
    for (int ell : signals) {
      const int idler = pump_ell - ell;
      const double c = model.range().contains(idler) ? model.amplitude(ell) : 0.0;
      weakest = std::min(weakest, c);
    }
    if (weakest <= 0.0) {
      throw ValidationError("pump_recipe: spectrum has no weight on a pair required by pump " +
                            std::to_string(pump_ell));
    }
    const double magnitude = 1.0 / weakest;
    total += magnitude * magnitude;
    terms.push_back({pump_ell, std::polar(magnitude, model.pump_phase(pump_ell))});
  }
  const double scale = 1.0 / std::sqrt(total);
  for (PumpTerm& t : terms) t.amplitude *= scale;
  return PumpSpec(std::move(terms));
}

GroupState group_state(int m, const SpdcModel& model) {
  PumpSpec pump = pump_recipe(m, model);
  const WindowRestriction restricted = restrict_to_window(spdc_state(pump, model), model);
  const int d = model.d();
  std::vector<int> support;
  for (int k = 0; k < d; ++k) support.push_back(k * d + index_sub(m, k, d));
  FilterResult filtered = procrustean_filter(restricted.state, model, support);
  return {std::move(pump), std::move(filtered.state), restricted.discarded_probability, filtered.efficiency};
}

}  // namespace belltk
