#include "belltk/config.hpp"

#include <cstdlib>

#include "json.hpp"

#include "belltk/error.hpp"

namespace belltk {

using nlohmann::json;

ModeWindow PipelineConfig::mode_window() const {
  if (window.empty()) return ModeWindow::centered(d);
  ModeWindow w(window);
  if (w.d() != d) throw ValidationError("config: window has " + std::to_string(w.d()) + " labels but d = " + std::to_string(d));
  return w;
}

SpdcModel PipelineConfig::spdc_model() const {
  SpdcModel model = profile == SpectrumProfile::kFlat ? SpdcModel::flat(mode_window(), ell_range)
                                                      : SpdcModel::gaussian(mode_window(), sigma, ell_range);
  return model.with_pump_phases(pump_phases);
}

std::string PipelineConfig::resolved_output_dir() const {
  if (!output_dir.empty()) return output_dir;
  if (const char* env = std::getenv("BELLTK_OUT"); env != nullptr && *env != '\0') return env;
  return "out";
}

void PipelineConfig::validate() const {
  if (d < 2) throw ValidationError("config: d must be >= 2");
  mode_window();
  if (ell_range.lo > ell_range.hi) throw ValidationError("config: empty ell_range");
  if (profile == SpectrumProfile::kGaussian && !(sigma > 0.0)) throw ValidationError("config: sigma must be positive");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ValidationError("config: epsilon must lie in [0, 1)");
  if (shots < 1) throw ValidationError("config: shots must be >= 1");
  if (solver.max_iters < 1) throw ValidationError("config: solver.max_iters must be >= 1");
  if (!(solver.tol >= 0.0)) throw ValidationError("config: solver.tol must be >= 0");
  if (solver.floor && !(*solver.floor > 0.0)) throw ValidationError("config: solver.floor must be positive");
  spdc_model();
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  PipelineConfig cfg;
  try {
    const json j = json::parse(text);
    cfg.d = j.value("d", cfg.d);
    cfg.window = j.value("window", cfg.window);
    if (j.contains("ell_range")) {
      const auto r = j.at("ell_range").get<std::vector<int>>();
      if (r.size() != 2) throw ValidationError("config: ell_range must be [lo, hi]");
      cfg.ell_range = {r[0], r[1]};
    }
    if (j.contains("spectrum")) {
      const json& s = j.at("spectrum");
      const std::string profile = s.value("profile", std::string("flat"));
      if (profile == "flat") {
        cfg.profile = SpectrumProfile::kFlat;
      } else if (profile == "gaussian") {
        cfg.profile = SpectrumProfile::kGaussian;
      } else {
        throw ValidationError("config: unknown spectrum profile '" + profile + "'");
      }
      cfg.sigma = s.value("sigma", cfg.sigma);
    }
    if (j.contains("pump_phases")) {
      for (const auto& [key, value] : j.at("pump_phases").items()) cfg.pump_phases[std::stoi(key)] = value.get<double>();
    }
    if (j.contains("gate")) {
      const json& g = j.at("gate");
      const std::string kind = g.value("kind", std::string("dove"));
      if (kind == "dove") {
        cfg.gate = GateKind::kDovePrism;
      } else if (kind == "pauli_z") {
        cfg.gate = GateKind::kPauliZ;
      } else {
        throw ValidationError("config: unknown gate kind '" + kind + "'");
      }
      cfg.gate_party = parse_party(g.value("party", std::string("A")));
    }
    if (j.contains("noise")) {
      const json& n = j.at("noise");
      cfg.epsilon = n.value("epsilon", cfg.epsilon);
      cfg.shots = n.value("shots", cfg.shots);
      cfg.seed = n.value("seed", cfg.seed);
      const std::string edge = n.value("edge", std::string("reflect"));
      if (edge == "reflect") {
        cfg.edge = CrosstalkEdge::kReflect;
      } else if (edge == "leak") {
        cfg.edge = CrosstalkEdge::kLeak;
      } else {
        throw ValidationError("config: unknown crosstalk edge mode '" + edge + "'");
      }
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
      cfg.solver.tol = s.value("tol", cfg.solver.tol);
      cfg.solver.step = s.value("step", cfg.solver.step);
      if (s.contains("floor") && !s.at("floor").is_null()) cfg.solver.floor = s.at("floor").get<double>();
      const std::string rule = s.value("step_rule", std::string("backtracking"));
      if (rule == "backtracking") {
        cfg.solver.step_rule = StepRule::kBacktracking;
      } else if (rule == "constant") {
        cfg.solver.step_rule = StepRule::kConstant;
      } else {
        throw ValidationError("config: unknown step rule '" + rule + "'");
      }
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string PipelineConfig::to_json() const {
  json j;
  j["d"] = d;
  j["window"] = mode_window().labels();
  j["ell_range"] = {ell_range.lo, ell_range.hi};
  j["spectrum"] = {{"profile", profile == SpectrumProfile::kFlat ? "flat" : "gaussian"}, {"sigma", sigma}};
  json phases = json::object();
  for (const auto& [ell, phase] : pump_phases) phases[std::to_string(ell)] = phase;
  j["pump_phases"] = phases;
  j["gate"] = {{"kind", gate == GateKind::kDovePrism ? "dove" : "pauli_z"}, {"party", std::string(to_string(gate_party))}};
  j["noise"] = {{"epsilon", epsilon},
                {"edge", edge == CrosstalkEdge::kReflect ? "reflect" : "leak"},
                {"shots", shots},
                {"seed", seed}};
  j["solver"] = {{"max_iters", solver.max_iters},
                 {"tol", solver.tol},
                 {"step", solver.step},
                 {"step_rule", solver.step_rule == StepRule::kBacktracking ? "backtracking" : "constant"},
                 {"floor", solver.floor ? json(*solver.floor) : json(nullptr)}};
  j["output_dir"] = output_dir;
  return j.dump(2) + "\n";
}

}  // namespace belltk
