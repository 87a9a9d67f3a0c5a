#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "belltk/gates.hpp"
#include "belltk/measurement.hpp"
#include "belltk/spdc.hpp"
#include "belltk/tomography.hpp"

namespace belltk {

enum class GateKind { kDovePrism, kPauliZ };

// Everything a pipeline run depends on. Loaded from JSON; every field is
// optional there and falls back to the defaults below.
struct PipelineConfig {
  int d = 4;
  std::vector<int> window;  // empty: ModeWindow::centered(d)
  EllRange ell_range{-5, 5};
  SpectrumProfile profile = SpectrumProfile::kFlat;
  double sigma = 2.0;
  std::map<int, double> pump_phases;

  GateKind gate = GateKind::kDovePrism;
  Party gate_party = Party::kA;

  double epsilon = 0.0;
  CrosstalkEdge edge = CrosstalkEdge::kReflect;
  std::uint64_t shots = 10000;
  std::uint64_t seed = 7;

  SolverOptions solver;

  std::string output_dir;  // empty: $BELLTK_OUT, then "out"

  ModeWindow mode_window() const;
  SpdcModel spdc_model() const;
  std::string resolved_output_dir() const;
  void validate() const;

  static PipelineConfig from_json(const std::string& text);
  std::string to_json() const;
};

}  // namespace belltk
