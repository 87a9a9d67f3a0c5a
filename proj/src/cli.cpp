#include "belltk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <future>
#include <iomanip>
#include <ostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "belltk/bellbasis.hpp"
#include "belltk/certify.hpp"
#include "belltk/config.hpp"
#include "belltk/error.hpp"
#include "belltk/formats.hpp"
#include "belltk/gates.hpp"
#include "belltk/measurement.hpp"
#include "belltk/spdc.hpp"
#include "belltk/tomography.hpp"

namespace belltk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Sorted regular files in `dir` whose name ends with `suffix`.
std::vector<fs::path> files_with_suffix(const fs::path& dir, const std::string& suffix) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string strip_suffix(const std::string& name, std::initializer_list<const char*> suffixes) {
  for (const char* s : suffixes) {
    const std::string suffix(s);
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return name.substr(0, name.size() - suffix.size());
    }
  }
  return name;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return PipelineConfig::from_json(formats::read_text_file(path));
}

// ---------------------------------------------------------------- basis

struct BasisArgs {
  int d = 4;
  std::string convention = "minus";
  std::string out;
};

int cmd_basis(const BasisArgs& a, std::ostream& out) {
  const BellConvention convention = parse_convention(a.convention);
  const std::vector<PureState> basis = full_basis(a.d, convention);
  PipelineConfig cfg;
  cfg.d = a.d;
  cfg.output_dir = a.out;
  const fs::path dir = cfg.resolved_output_dir();
  const ModeWindow window = ModeWindow::centered(a.d);
  const auto n = static_cast<Eigen::Index>(basis.size());
  RMatrix gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const BellIndex idx = BellIndex::from_flat(a.d, static_cast<int>(i));
    formats::write_text_file(dir / (formats::bell_label(idx) + ".json"),
                             formats::write_state_json(basis[static_cast<std::size_t>(i)], window));
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(i, j) = std::abs(inner_product(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]));
    }
  }
  formats::write_text_file(dir / "gram.csv", formats::write_matrix_csv(gram));
  out << "wrote " << n << " " << to_string(convention) << " Bell states to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string config;
  std::optional<int> d;
  std::optional<std::string> profile;
  std::optional<double> sigma;
  std::optional<std::string> party;
  std::optional<std::string> gate;
  std::optional<int> only_n;
  std::optional<int> only_m;
  std::string out;
  bool stamp = false;
};

struct GeneratedState {
  BellIndex index;
  PureState state;
  json manifest_entry;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  PipelineConfig cfg = load_config(a.config);
  if (a.d) cfg.d = *a.d;
  if (a.d && !cfg.window.empty() && static_cast<int>(cfg.window.size()) != *a.d) cfg.window.clear();
  if (a.profile) {
    if (*a.profile == "flat") {
      cfg.profile = SpectrumProfile::kFlat;
    } else if (*a.profile == "gaussian") {
      cfg.profile = SpectrumProfile::kGaussian;
    } else {
      throw ValidationError("unknown profile '" + *a.profile + "'");
    }
  }
  if (a.sigma) cfg.sigma = *a.sigma;
  if (a.party) cfg.gate_party = parse_party(*a.party);
  if (a.gate) {
    if (*a.gate == "dove") {
      cfg.gate = GateKind::kDovePrism;
    } else if (*a.gate == "pauli_z") {
      cfg.gate = GateKind::kPauliZ;
    } else {
      throw ValidationError("unknown gate '" + *a.gate + "'");
    }
  }
  if (!a.out.empty()) cfg.output_dir = a.out;
  cfg.validate();

  const int d = cfg.d;
  const ModeWindow window = cfg.mode_window();
  if (cfg.gate == GateKind::kDovePrism && !window.contiguous()) {
    throw ValidationError("generate: the Dove-prism gate needs a contiguous mode window");
  }
  if (a.only_n && (*a.only_n < 0 || *a.only_n >= d)) throw ValidationError("generate: --n outside [0, d)");
  if (a.only_m && (*a.only_m < 0 || *a.only_m >= d)) throw ValidationError("generate: --m outside [0, d)");
  const SpdcModel model = cfg.spdc_model();
  const fs::path dir = cfg.resolved_output_dir();

  // One unit of work per correlation class; each owns its outputs.
  std::vector<std::future<std::vector<GeneratedState>>> jobs;
  for (int m = 0; m < d; ++m) {
    if (a.only_m && m != *a.only_m) continue;
    jobs.push_back(std::async(std::launch::async, [&, m] {
      const GroupState group = group_state(m, model);
      json pump = json::array();
      for (const PumpTerm& t : group.pump.terms()) {
        pump.push_back({{"ell", t.ell}, {"re", t.amplitude.real()}, {"im", t.amplitude.imag()}});
      }
      std::vector<GeneratedState> produced;
      for (int n = 0; n < d; ++n) {
        if (a.only_n && n != *a.only_n) continue;
        json gate;
        Operator op = Operator::identity(d);
        if (cfg.gate == GateKind::kDovePrism) {
          const double alpha = dove_angle_for_phase_class(n, d, cfg.gate_party);
          op = dove_prism(alpha, window);
          gate = {{"kind", "dove"}, {"party", std::string(to_string(cfg.gate_party))}, {"alpha", alpha}};
        } else {
          // Z^n on B produces the phase class d - n.
          const int power = cfg.gate_party == Party::kA ? n : index_sub(0, n, d);
          op = pauli_z(d, power);
          gate = {{"kind", "pauli_z"}, {"party", std::string(to_string(cfg.gate_party))}, {"power", power}};
        }
        const BellIndex idx(d, m, n);
        PureState state = apply_local(op, cfg.gate_party, group.state);
        const double overlap = std::norm(inner_product(bell_state_minus(idx), state));
        json entry = {{"m", m},
                      {"n", n},
                      {"file", formats::bell_label(idx) + ".json"},
                      {"pump", pump},
                      {"discarded_probability", group.discarded_probability},
                      {"filter_efficiency", group.efficiency},
                      {"gate", gate},
                      {"fidelity_to_ideal", overlap}};
        produced.push_back({idx, std::move(state), std::move(entry)});
      }
      return produced;
    }));
  }

  std::vector<GeneratedState> all;
  for (auto& job : jobs) {
    for (auto& g : job.get()) all.push_back(std::move(g));
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.index.flat() < y.index.flat(); });

  json manifest;
  manifest["config"] = json::parse(cfg.to_json());
  manifest["states"] = json::array();
  double worst = 1.0;
  for (const auto& g : all) {
    formats::write_text_file(dir / g.manifest_entry["file"].get<std::string>(), formats::write_state_json(g.state, window));
    manifest["states"].push_back(g.manifest_entry);
    worst = std::min(worst, g.manifest_entry["fidelity_to_ideal"].get<double>());
  }
  if (a.stamp) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    manifest["created"] = buf;
  }
  formats::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "generated " << all.size() << " states in " << dir.string() << "; worst fidelity to ideal "
      << fixed(worst, 12) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::string state;
  std::string out;
  std::string probabilities;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> edge;
};

struct LoadedState {
  DensityMatrix rho;
  ModeWindow window;
};

LoadedState load_any_state(const fs::path& path, const PipelineConfig& cfg) {
  const std::string text = formats::read_text_file(path);
  if (text.find("\"amplitudes\"") != std::string::npos) {
    formats::StateFile f = formats::read_state_json(text);
    if (f.state.dim() != f.window.d() * f.window.d()) {
      throw ValidationError("'" + path.string() + "' is not a two-party state");
    }
    return {DensityMatrix::from_pure(f.state), f.window};
  }
  DensityMatrix rho = formats::read_density_json(text);
  const int d = local_dimension(rho.dim());
  ModeWindow window = cfg.window.empty() ? ModeWindow::centered(d) : cfg.mode_window();
  if (window.d() != d) throw ValidationError("'" + path.string() + "': config window does not match the state");
  return {std::move(rho), std::move(window)};
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  PipelineConfig cfg = load_config(a.config);
  if (a.epsilon) cfg.epsilon = *a.epsilon;
  if (a.shots) cfg.shots = *a.shots;
  if (a.seed) cfg.seed = *a.seed;
  if (a.edge) {
    if (*a.edge == "reflect") {
      cfg.edge = CrosstalkEdge::kReflect;
    } else if (*a.edge == "leak") {
      cfg.edge = CrosstalkEdge::kLeak;
    } else {
      throw ValidationError("unknown edge mode '" + *a.edge + "'");
    }
  }
  cfg.validate();

  const fs::path input(a.state);
  if (!fs::exists(input)) throw ValidationError("state file '" + a.state + "' does not exist");

  auto simulate_one = [&](const fs::path& src, const fs::path& dst, std::uint64_t seed,
                          const std::string& prob_path) {
    const LoadedState loaded = load_any_state(src, cfg);
    const DensityMatrix noisy = crosstalk_channel(loaded.rho, cfg.epsilon, loaded.window, cfg.edge);
    const std::vector<MeasurementSetting> settings = joint_settings(loaded.window.d());
    formats::write_text_file(dst, formats::write_counts_csv(simulate_counts(noisy, settings, cfg.shots, seed)));
    if (!prob_path.empty()) {
      formats::write_text_file(prob_path,
                               formats::write_probabilities_csv(settings, forward_probabilities(noisy, settings)));
    }
  };

  if (fs::is_directory(input)) {
    if (!a.probabilities.empty()) throw ValidationError("--probabilities needs a single state file");
    const fs::path dir = a.out.empty() ? fs::path(cfg.resolved_output_dir()) : fs::path(a.out);
    std::vector<fs::path> sources;
    for (const auto& p : files_with_suffix(input, ".json")) {
      const std::string name = p.filename().string();
      if (name.rfind("psi_", 0) == 0) sources.push_back(p);
    }
    if (sources.empty()) throw ValidationError("no psi_*.json states in '" + input.string() + "'");
    for (const auto& src : sources) {
      const std::string stem = strip_suffix(src.filename().string(), {".rho.json", ".json"});
      simulate_one(src, dir / (stem + ".counts.csv"), setting_seed(cfg.seed, fnv1a(stem)), "");
    }
    out << "simulated " << sources.size() << " states into " << dir.string() << "\n";
    return kExitOk;
  }

  const fs::path dst = a.out.empty() ? fs::path(cfg.resolved_output_dir()) / "counts.csv" : fs::path(a.out);
  simulate_one(input, dst, cfg.seed, a.probabilities);
  out << "wrote " << dst.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- tomo

struct TomoArgs {
  std::string config;
  std::string counts;
  std::string out;
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::optional<double> floor;
  std::optional<std::string> step_rule;
};

int cmd_tomo(const TomoArgs& a, std::ostream& out) {
  PipelineConfig cfg = load_config(a.config);
  if (a.max_iters) cfg.solver.max_iters = *a.max_iters;
  if (a.tol) cfg.solver.tol = *a.tol;
  if (a.floor) cfg.solver.floor = *a.floor;
  if (a.step_rule) {
    if (*a.step_rule == "backtracking") {
      cfg.solver.step_rule = StepRule::kBacktracking;
    } else if (*a.step_rule == "constant") {
      cfg.solver.step_rule = StepRule::kConstant;
    } else {
      throw ValidationError("unknown step rule '" + *a.step_rule + "'");
    }
  }
  if (!a.out.empty()) cfg.output_dir = a.out;
  cfg.validate();

  const fs::path input(a.counts);
  if (!fs::exists(input)) throw ValidationError("counts file '" + a.counts + "' does not exist");
  std::vector<fs::path> sources = fs::is_directory(input) ? files_with_suffix(input, ".csv") : std::vector{input};
  if (sources.empty()) throw ValidationError("no CSV files in '" + input.string() + "'");
  const fs::path dir = cfg.resolved_output_dir();

  struct Outcome {
    std::string stem;
    TomographyResult result;
  };
  // Parse everything first so data errors surface before any solver work.
  std::vector<std::pair<std::string, TomographyProblem>> problems;
  for (const auto& src : sources) {
    problems.emplace_back(strip_suffix(src.filename().string(), {".counts.csv", ".probabilities.csv", ".csv"}),
                          formats::read_measurement_csv(formats::read_text_file(src)));
  }
  std::vector<std::future<Outcome>> jobs;
  for (const auto& [stem, problem] : problems) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &stem = stem, &problem = problem] {
      return Outcome{stem, reconstruct(problem, cfg.solver)};
    }));
  }
  bool all_converged = true;
  for (auto& job : jobs) {
    const Outcome o = job.get();
    formats::write_text_file(dir / (o.stem + ".rho.json"), formats::write_density_json(o.result.rho));
    formats::write_text_file(dir / (o.stem + ".diagnostics.json"), formats::write_diagnostics_json(o.result));
    out << o.stem << ": chi2=" << formats::format_double(o.result.chi_square) << " iterations=" << o.result.iterations
        << (o.result.converged ? "" : " (not converged)") << "\n";
    all_converged = all_converged && o.result.converged;
  }
  return all_converged ? kExitOk : kExitNoConvergence;
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
  std::string rho;
  std::string table;
  std::string convention = "minus";
  std::string target;
  std::string out;
};

json report_entry(const CertificationReport& r) {
  return {{"m", r.target.m},
          {"n", r.target.n},
          {"label", formats::bell_label(r.target)},
          {"fidelity", r.fidelity},
          {"witness_bound", r.witness_bound},
          {"passes_witness", r.passes_witness},
          {"d_ent", r.d_ent}};
}

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  if (a.rho.empty() == a.table.empty()) throw ValidationError("certify: give exactly one of --rho or --table");
  const BellConvention convention = parse_convention(a.convention);
  PipelineConfig cfg;
  cfg.output_dir = a.out;
  const fs::path dir = cfg.resolved_output_dir();

  std::vector<CertificationReport> reports;
  RMatrix overlap;
  std::vector<BellIndex> row_labels;
  std::vector<BellIndex> col_labels;
  std::string source;
  int d = 0;

  if (!a.table.empty()) {
    const formats::LabelledOverlap table = formats::read_overlap_csv(formats::read_text_file(a.table));
    const OverlapMatrix canonical = formats::canonical_overlap(table);
    d = table.cols.front().d;
    for (int i = 0; i < d * d; ++i) {
      const BellIndex idx = BellIndex::from_flat(d, i);
      row_labels.push_back(idx);
      col_labels.push_back(idx);
      const double f = canonical.values(i, i);
      CertificationReport r;
      r.target = idx;
      r.fidelity = f;
      r.witness_bound = witness_bound(d, d);
      r.passes_witness = f > r.witness_bound;
      r.d_ent = entanglement_dimensionality(f, d);
      reports.push_back(r);
    }
    overlap = canonical.values;
    source = fs::path(a.table).filename().string();
  } else {
    const fs::path input(a.rho);
    if (!fs::exists(input)) throw ValidationError("'" + a.rho + "' does not exist");
    std::vector<fs::path> files = fs::is_directory(input) ? files_with_suffix(input, ".rho.json") : std::vector{input};
    if (files.empty()) throw ValidationError("no *.rho.json files in '" + input.string() + "'");
    std::vector<std::pair<BellIndex, DensityMatrix>> states;
    for (const auto& f : files) {
      DensityMatrix rho = formats::read_density_json(formats::read_text_file(f));
      const int local = local_dimension(rho.dim());
      if (d == 0) d = local;
      if (local != d) throw ValidationError("certify: states of different dimension");
      std::optional<BellIndex> idx = formats::parse_bell_label(f.filename().string(), d);
      if (!a.target.empty()) {
        if (files.size() != 1) throw ValidationError("--target applies to a single state file");
        idx = formats::parse_bell_label("psi_" + std::regex_replace(a.target, std::regex(","), "_"), d);
      }
      if (!idx) throw ValidationError("cannot infer target Bell index for '" + f.string() + "'; use --target m,n");
      states.emplace_back(*idx, std::move(rho));
    }
    std::sort(states.begin(), states.end(), [](const auto& x, const auto& y) { return x.first.flat() < y.first.flat(); });
    const std::vector<PureState> basis = full_basis(d, convention);
    overlap.resize(static_cast<Eigen::Index>(states.size()), d * d);
    for (std::size_t i = 0; i < states.size(); ++i) {
      row_labels.push_back(states[i].first);
      reports.push_back(certify(states[i].second, states[i].first, convention));
      for (int j = 0; j < d * d; ++j) overlap(static_cast<Eigen::Index>(i), j) = fidelity(states[i].second, basis[j]);
    }
    for (int j = 0; j < d * d; ++j) col_labels.push_back(BellIndex::from_flat(d, j));
    source = input.filename().string();
  }

  json report;
  report["d"] = d;
  report["convention"] = std::string(to_string(convention));
  report["source"] = source;
  report["witness_bound"] = witness_bound(d, d);
  report["states"] = json::array();
  double sum = 0.0;
  bool all_pass = true;
  int min_d_ent = d;
  for (const auto& r : reports) {
    report["states"].push_back(report_entry(r));
    sum += r.fidelity;
    all_pass = all_pass && r.passes_witness;
    min_d_ent = std::min(min_d_ent, r.d_ent);
  }
  report["mean_fidelity"] = sum / static_cast<double>(reports.size());
  report["all_pass"] = all_pass;
  report["min_d_ent"] = min_d_ent;
  if (overlap.rows() == overlap.cols()) {
    report["mutual_information_bits"] = mutual_information(overlap);
  } else {
    report["mutual_information_bits"] = nullptr;
  }

  std::vector<std::string> rows_text;
  std::vector<std::string> cols_text;
  for (const auto& r : row_labels) rows_text.push_back(formats::bell_label(r));
  for (const auto& c : col_labels) cols_text.push_back(formats::bell_label(c));
  formats::write_text_file(dir / "report.json", report.dump(2) + "\n");
  formats::write_text_file(dir / "overlap.csv", formats::write_overlap_csv(overlap, row_labels, col_labels));
  formats::write_text_file(dir / "overlap.svg",
                           formats::heatmap_svg(overlap, rows_text, cols_text, "Overlap with the ideal Bell basis"));
  out << "certified " << reports.size() << " states: mean fidelity " << fixed(report["mean_fidelity"].get<double>(), 4)
      << ", " << (all_pass ? "all" : "not all") << " above " << fixed(witness_bound(d, d), 4) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string dir;
};

std::string bar_chart_svg(const std::vector<std::pair<std::string, double>>& bars, double threshold) {
  constexpr int kBar = 30;
  constexpr int kHeight = 200;
  constexpr int kLeft = 40;
  constexpr int kTop = 30;
  const int width = kLeft + static_cast<int>(bars.size()) * kBar + 20;
  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << kTop + kHeight + 60
      << R"(" font-family="sans-serif" font-size="8">)" << "\n";
  svg << R"(<text x="4" y="14" font-size="12">Fidelity to target (line: witness bound)</text>)" << "\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double v = std::clamp(bars[i].second, 0.0, 1.0);
    const int h = static_cast<int>(std::lround(v * kHeight));
    const int x = kLeft + static_cast<int>(i) * kBar;
    svg << R"(<rect x=")" << x + 3 << R"(" y=")" << kTop + kHeight - h << R"(" width=")" << kBar - 6
        << R"(" height=")" << h << R"lit(" fill="rgb(70,110,200)"/>)lit" << "\n";
    svg << R"(<text x=")" << x + 2 << R"(" y=")" << kTop + kHeight + 12 << R"(" transform="rotate(60 )" << x + 2
        << " " << kTop + kHeight + 12 << R"lit()">)lit" << bars[i].first << "</text>\n";
  }
  const int y = kTop + kHeight - static_cast<int>(std::lround(threshold * kHeight));
  svg << R"(<line x1=")" << kLeft << R"(" y1=")" << y << R"(" x2=")" << width - 20 << R"(" y2=")" << y
      << R"lit(" stroke="rgb(200,30,30)" stroke-width="1.5"/>)lit" << "\n";
  svg << "</svg>\n";
  return svg.str();
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const fs::path dir(a.dir);
  if (!fs::is_directory(dir)) throw ValidationError("'" + a.dir + "' is not a directory");
  if (fs::is_empty(dir)) throw ValidationError("'" + a.dir + "' is empty");
  const fs::path report_path = dir / "report.json";
  if (!fs::exists(report_path)) throw ValidationError("no report.json in '" + a.dir + "'; run certify first");
  const json report = json::parse(formats::read_text_file(report_path));

  std::ostringstream text;
  text << "Bell-basis certification summary\n";
  text << "source: " << report.value("source", std::string()) << "\n";
  text << "d = " << report.at("d").get<int>() << ", witness bound " << fixed(report.at("witness_bound").get<double>(), 4)
       << "\n\n";
  text << "state      fidelity  pass  d_ent\n";
  std::vector<std::pair<std::string, double>> bars;
  for (const auto& s : report.at("states")) {
    const std::string label = s.at("label").get<std::string>();
    const double f = s.at("fidelity").get<double>();
    text << std::left << std::setw(10) << label << " " << fixed(f, 4) << "    " << (s.at("passes_witness").get<bool>() ? "yes" : "no ")
         << "   " << s.at("d_ent").get<int>() << "\n";
    bars.emplace_back(label, f);
  }
  text << "\nmean fidelity: " << fixed(report.at("mean_fidelity").get<double>(), 4) << "\n";
  text << "all states pass witness: " << (report.at("all_pass").get<bool>() ? "yes" : "no") << "\n";
  text << "certified entanglement dimensionality (min): " << report.at("min_d_ent").get<int>() << "\n";
  if (!report.at("mutual_information_bits").is_null()) {
    text << "mutual information: " << fixed(report.at("mutual_information_bits").get<double>(), 4) << " bits\n";
  }
  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    const json manifest = json::parse(formats::read_text_file(manifest_path));
    double worst = 1.0;
    double efficiency = 1.0;
    for (const auto& s : manifest.at("states")) {
      worst = std::min(worst, s.at("fidelity_to_ideal").get<double>());
      efficiency = std::min(efficiency, s.at("filter_efficiency").get<double>());
    }
    text << "generation: worst fidelity to ideal " << fixed(worst, 12) << ", lowest filter efficiency "
         << fixed(efficiency, 4) << "\n";
  }
  formats::write_text_file(dir / "summary.txt", text.str());
  formats::write_text_file(dir / "summary.svg", bar_chart_svg(bars, report.at("witness_bound").get<double>()));
  out << text.str();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"belltk: generate, measure, reconstruct and certify high-dimensional Bell states"};
  app.require_subcommand(1);

  BasisArgs basis_args;
  auto* basis = app.add_subcommand("basis", "Write the full Bell basis and its Gram matrix");
  basis->add_option("--d", basis_args.d, "Local dimension")->check(CLI::Range(2, 64));
  basis->add_option("--convention", basis_args.convention, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
  basis->add_option("--out", basis_args.out, "Output directory");

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Pump recipe, SPDC, filtering and phase gate for every (m, n)");
  gen->add_option("--config", gen_args.config, "Pipeline config JSON");
  gen->add_option("--d", gen_args.d, "Local dimension")->check(CLI::Range(2, 64));
  gen->add_option("--profile", gen_args.profile, "flat or gaussian");
  gen->add_option("--sigma", gen_args.sigma, "Gaussian spectrum width");
  gen->add_option("--party", gen_args.party, "Party carrying the phase gate (A or B)");
  gen->add_option("--gate", gen_args.gate, "dove or pauli_z");
  gen->add_option("--n", gen_args.only_n, "Only this phase class");
  gen->add_option("--m", gen_args.only_m, "Only this correlation class");
  gen->add_option("--out", gen_args.out, "Output directory");
  gen->add_flag("--stamp", gen_args.stamp, "Record a creation timestamp in the manifest");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Apply crosstalk and sample coincidence counts over all settings");
  sim->add_option("--config", sim_args.config, "Pipeline config JSON");
  sim->add_option("--state", sim_args.state, "State or density-matrix JSON, or a directory of psi_*.json")->required();
  sim->add_option("--out", sim_args.out, "Counts CSV (single state) or output directory");
  sim->add_option("--probabilities", sim_args.probabilities, "Also write exact probabilities to this CSV");
  sim->add_option("--epsilon", sim_args.epsilon, "Adjacent-mode crosstalk");
  sim->add_option("--shots", sim_args.shots, "Shots per setting");
  sim->add_option("--seed", sim_args.seed, "Random seed");
  sim->add_option("--edge", sim_args.edge, "reflect or leak");

  TomoArgs tomo_args;
  auto* tomo = app.add_subcommand("tomo", "Reconstruct density matrices from counts or probabilities");
  tomo->add_option("--config", tomo_args.config, "Pipeline config JSON");
  tomo->add_option("--counts", tomo_args.counts, "Counts/probabilities CSV or a directory of CSVs")->required();
  tomo->add_option("--out", tomo_args.out, "Output directory");
  tomo->add_option("--max-iters", tomo_args.max_iters, "Iteration cap");
  tomo->add_option("--tol", tomo_args.tol, "Relative chi-square decrease tolerance");
  tomo->add_option("--floor", tomo_args.floor, "Denominator floor");
  tomo->add_option("--step-rule", tomo_args.step_rule, "backtracking or constant");

  CertifyArgs cert_args;
  auto* cert = app.add_subcommand("certify", "Fidelities, overlap matrix and dimensionality witness");
  cert->add_option("--rho", cert_args.rho, "Density-matrix JSON or a directory of *.rho.json");
  cert->add_option("--table", cert_args.table, "Labelled overlap CSV to reanalyse");
  cert->add_option("--convention", cert_args.convention, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
  cert->add_option("--target", cert_args.target, "Target m,n for a single unlabelled state");
  cert->add_option("--out", cert_args.out, "Output directory");

  ReportArgs report_args;
  auto* rep = app.add_subcommand("report", "One-page text and SVG summary of a certified run");
  rep->add_option("--dir", report_args.dir, "Directory holding report.json")->required();

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("belltk");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (basis->parsed()) return cmd_basis(basis_args, out);
    if (gen->parsed()) return cmd_generate(gen_args, out);
    if (sim->parsed()) return cmd_simulate(sim_args, out);
    if (tomo->parsed()) return cmd_tomo(tomo_args, out);
    if (cert->parsed()) return cmd_certify(cert_args, out);
    if (rep->parsed()) return cmd_report(report_args, out);
  } catch (const IncompleteMeasurement& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace belltk::cli
