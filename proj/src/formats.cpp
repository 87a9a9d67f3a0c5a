#include "belltk/formats.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "belltk/error.hpp"

namespace belltk::formats {

using nlohmann::json;

namespace {

constexpr const char* kCountsHeader = "setting_id,projA_kind,projA_params,projB_kind,projB_params,counts,shots";
constexpr const char* kProbabilitiesHeader =
    "setting_id,projA_kind,projA_params,projB_kind,projB_params,probability";

json complex_array(const Complex* data, std::size_t n) {
  json out = json::array();
  for (std::size_t i = 0; i < n; ++i) out.push_back({data[i].real(), data[i].imag()});
  return out;
}

Complex complex_from(const json& pair) {
  if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
    throw ValidationError("expected a [re, im] pair");
  }
  return {pair[0].get<double>(), pair[1].get<double>()};
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": malformed JSON (" + e.what() + ")");
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ValidationError("not a number: '" + s + "'");
  return v;
}

long long parse_integer(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw ValidationError("not an integer: '" + s + "'");
  return v;
}

std::string setting_columns(const MeasurementSetting& s) {
  return projector_kind(s.a) + "," + projector_params(s.a) + "," + projector_kind(s.b) + "," + projector_params(s.b);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string write_state_json(const PureState& state, const ModeWindow& window) {
  if (state.dim() != window.d() && state.dim() != window.d() * window.d()) {
    throw DimensionMismatch("write_state_json: state dim matches neither d nor d^2 of the window");
  }
  json j;
  j["dim"] = state.dim();
  j["window"] = window.labels();
  j["amplitudes"] = complex_array(state.amplitudes().data(), static_cast<std::size_t>(state.dim()));
  return j.dump(2) + "\n";
}

StateFile read_state_json(const std::string& text) {
  const json j = parse_json(text, "state JSON");
  try {
    const int dim = j.at("dim").get<int>();
    ModeWindow window(j.at("window").get<std::vector<int>>());
    const json& amps = j.at("amplitudes");
    if (!amps.is_array() || static_cast<int>(amps.size()) != dim || dim < 1) {
      throw ValidationError("state JSON: amplitudes length does not match dim");
    }
    if (dim != window.d() && dim != window.d() * window.d()) {
      throw ValidationError("state JSON: dim matches neither d nor d^2 of the window");
    }
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = complex_from(amps[static_cast<std::size_t>(i)]);
    return {PureState(std::move(v)), std::move(window)};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("state JSON: ") + e.what());
  }
}

std::string write_density_json(const DensityMatrix& rho) {
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor rm = rho.entries();
  json j;
  j["dim"] = rho.dim();
  j["entries"] = complex_array(rm.data(), static_cast<std::size_t>(rm.size()));
  return j.dump(2) + "\n";
}

DensityMatrix read_density_json(const std::string& text) {
  const json j = parse_json(text, "density-matrix JSON");
  try {
    const int dim = j.at("dim").get<int>();
    const json& entries = j.at("entries");
    if (dim < 1 || !entries.is_array() || entries.size() != static_cast<std::size_t>(dim) * dim) {
      throw ValidationError("density-matrix JSON: entries length is not dim^2");
    }
    CMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) m(r, c) = complex_from(entries[static_cast<std::size_t>(r * dim + c)]);
    return DensityMatrix(std::move(m));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("density-matrix JSON: ") + e.what());
  }
}

std::string write_diagnostics_json(const TomographyResult& result) {
  json j;
  j["chi_square"] = result.chi_square;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["residual_norm"] = result.residual_norm;
  j["min_eigenvalue"] = result.rho.min_eigenvalue();
  j["trace"] = result.rho.trace();
  return j.dump(2) + "\n";
}

std::string projector_kind(const ProjectorSpec& p) {
  return p.kind == ProjectorSpec::Kind::kPure ? "pure" : "superposition";
}

std::string projector_params(const ProjectorSpec& p) {
  if (p.kind == ProjectorSpec::Kind::kPure) return std::to_string(p.k1);
  return std::to_string(p.k1) + "-" + std::to_string(p.k2) + "-" + std::to_string(p.quarter * 90);
}

ProjectorSpec parse_projector(const std::string& kind, const std::string& params) {
  if (kind == "pure") return ProjectorSpec::pure(static_cast<int>(parse_integer(params)));
  if (kind == "superposition") {
    const auto parts = split(params, '-');
    if (parts.size() != 3) throw ValidationError("superposition params must be k1-k2-degrees, got '" + params + "'");
    const long long degrees = parse_integer(parts[2]);
    if (degrees % 90 != 0 || degrees < 0 || degrees > 270) {
      throw ValidationError("superposition phase must be 0, 90, 180 or 270 degrees");
    }
    return ProjectorSpec::superposition(static_cast<int>(parse_integer(parts[0])),
                                        static_cast<int>(parse_integer(parts[1])), static_cast<int>(degrees / 90));
  }
  throw ValidationError("unknown projector kind '" + kind + "'");
}

std::string write_counts_csv(const std::vector<CountRecord>& records) {
  std::string out = std::string(kCountsHeader) + "\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CountRecord& r = records[i];
    out += std::to_string(i) + "," + setting_columns(r.setting) + "," + std::to_string(r.counts) + "," +
           std::to_string(r.shots) + "\n";
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> csv_body(const std::string& text, const char* header, std::size_t columns) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != header) {
    throw ValidationError(std::string("CSV header mismatch, expected '") + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split(lines[i], ',');
    if (fields.size() != columns) {
      throw ValidationError("CSV line " + std::to_string(i + 1) + ": expected " + std::to_string(columns) +
                            " fields, got " + std::to_string(fields.size()));
    }
    if (parse_integer(fields[0]) < 0) {
      throw ValidationError("CSV line " + std::to_string(i + 1) + ": negative setting_id");
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw ValidationError("CSV has no data rows");
  return rows;
}

}  // namespace

std::vector<CountRecord> read_counts_csv(const std::string& text) {
  std::vector<CountRecord> out;
  for (const auto& f : csv_body(text, kCountsHeader, 7)) {
    const long long counts = parse_integer(f[5]);
    const long long shots = parse_integer(f[6]);
    if (counts < 0) throw ValidationError("counts CSV: negative counts");
    if (shots < 1) throw ValidationError("counts CSV: shots must be >= 1");
    out.push_back({{parse_projector(f[1], f[2]), parse_projector(f[3], f[4])},
                   static_cast<std::uint64_t>(counts),
                   static_cast<std::uint64_t>(shots)});
  }
  return out;
}

std::string write_probabilities_csv(const std::vector<MeasurementSetting>& settings,
                                    const std::vector<double>& probabilities) {
  if (settings.size() != probabilities.size()) throw ValidationError("write_probabilities_csv: size mismatch");
  std::string out = std::string(kProbabilitiesHeader) + "\n";
  for (std::size_t i = 0; i < settings.size(); ++i) {
    out += std::to_string(i) + "," + setting_columns(settings[i]) + "," + format_double(probabilities[i]) + "\n";
  }
  return out;
}

ProbabilityTable read_probabilities_csv(const std::string& text) {
  ProbabilityTable out;
  for (const auto& f : csv_body(text, kProbabilitiesHeader, 6)) {
    out.settings.push_back({parse_projector(f[1], f[2]), parse_projector(f[3], f[4])});
    out.probabilities.push_back(parse_double(f[5]));
  }
  return out;
}

TomographyProblem read_measurement_csv(const std::string& text) {
  const auto first_newline = text.find('\n');
  const std::string header = text.substr(0, first_newline == std::string::npos ? text.size() : first_newline);
  if (header.rfind(kCountsHeader, 0) == 0) {
    const auto records = read_counts_csv(text);
    return problem_from_counts(records);
  }
  ProbabilityTable table = read_probabilities_csv(text);
  int d = 0;
  for (const auto& s : table.settings) d = std::max({d, s.a.k1 + 1, s.a.k2 + 1, s.b.k1 + 1, s.b.k2 + 1});
  return problem_from_probabilities(d * d, std::move(table.settings), std::move(table.probabilities));
}

std::string write_matrix_csv(const RMatrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ",";
      out += format_double(m(r, c));
    }
    out += "\n";
  }
  return out;
}

RMatrix read_matrix_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ValidationError("matrix CSV: empty");
  const auto cols = split(lines.front(), ',').size();
  RMatrix m(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto fields = split(lines[r], ',');
    if (fields.size() != cols) throw ValidationError("matrix CSV: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(fields[c]);
    }
  }
  return m;
}

std::string bell_label(const BellIndex& idx) {
  return "psi_" + std::to_string(idx.m) + "_" + std::to_string(idx.n);
}

std::optional<BellIndex> parse_bell_label(const std::string& text, int d) {
  static const std::regex pattern(R"(psi_(\d+)_(\d+))");
  std::smatch match;
  if (!std::regex_search(text, match, pattern)) return std::nullopt;
  const int m = std::stoi(match[1].str());
  const int n = std::stoi(match[2].str());
  if (m >= d || n >= d) return std::nullopt;
  return BellIndex(d, m, n);
}

std::string write_overlap_csv(const RMatrix& values, const std::vector<BellIndex>& rows,
                              const std::vector<BellIndex>& cols) {
  if (static_cast<Eigen::Index>(rows.size()) != values.rows() ||
      static_cast<Eigen::Index>(cols.size()) != values.cols()) {
    throw ValidationError("write_overlap_csv: label count does not match matrix shape");
  }
  std::string out = "state";
  for (const auto& c : cols) out += "," + bell_label(c);
  out += "\n";
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out += bell_label(rows[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < values.cols(); ++c) out += "," + format_double(values(r, c));
    out += "\n";
  }
  return out;
}

LabelledOverlap read_overlap_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.size() < 2) throw ValidationError("overlap CSV: need a header and at least one row");
  const auto header = split(lines.front(), ',');
  if (header.empty() || header.front() != "state") throw ValidationError("overlap CSV: header must start with 'state'");
  const int d = local_dimension(static_cast<int>(header.size() - 1));
  LabelledOverlap out;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto idx = parse_bell_label(header[c], d);
    if (!idx) throw ValidationError("overlap CSV: bad column label '" + header[c] + "'");
    out.cols.push_back(*idx);
  }
  out.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(header.size() - 1));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split(lines[r], ',');
    if (fields.size() != header.size()) throw ValidationError("overlap CSV: ragged row " + std::to_string(r));
    const auto idx = parse_bell_label(fields.front(), d);
    if (!idx) throw ValidationError("overlap CSV: bad row label '" + fields.front() + "'");
    out.rows.push_back(*idx);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const double v = parse_double(fields[c]);
      if (v < 0.0 || v > 1.0) throw ValidationError("overlap CSV: entry outside [0, 1]");
      out.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) = v;
    }
  }
  return out;
}

OverlapMatrix canonical_overlap(const LabelledOverlap& table) {
  const auto n = static_cast<Eigen::Index>(table.cols.size());
  if (static_cast<Eigen::Index>(table.rows.size()) != n) throw ValidationError("canonical_overlap: table is not square");
  OverlapMatrix out{RMatrix::Constant(n, n, -1.0)};
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out.values(table.rows[static_cast<std::size_t>(r)].flat(), table.cols[static_cast<std::size_t>(c)].flat()) =
          table.values(r, c);
    }
  }
  if ((out.values.array() < 0.0).any()) throw ValidationError("canonical_overlap: duplicate or missing labels");
  return out;
}

std::string heatmap_svg(const RMatrix& values, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const std::string& title) {
  constexpr int kCell = 28;
  constexpr int kMargin = 70;
  const int rows = static_cast<int>(values.rows());
  const int cols = static_cast<int>(values.cols());
  const int width = kMargin + cols * kCell + 10;
  const int height = kMargin + rows * kCell + 10;
  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
      << R"(" font-family="sans-serif" font-size="8">)" << "\n";
  svg << R"(<text x="4" y="14" font-size="12">)" << title << "</text>\n";
  for (int c = 0; c < cols; ++c) {
    const int x = kMargin + c * kCell + kCell / 2;
    svg << R"(<text x=")" << x << R"(" y=")" << kMargin - 6 << R"(" transform="rotate(-60 )" << x << " "
        << kMargin - 6 << R"lit()">)lit" << col_labels.at(static_cast<std::size_t>(c)) << "</text>\n";
  }
  for (int r = 0; r < rows; ++r) {
    const int y = kMargin + r * kCell;
    svg << R"(<text x="4" y=")" << y + kCell / 2 + 3 << R"(">)" << row_labels.at(static_cast<std::size_t>(r))
        << "</text>\n";
    for (int c = 0; c < cols; ++c) {
      const double v = std::clamp(values(r, c), 0.0, 1.0);
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      svg << R"(<rect x=")" << kMargin + c * kCell << R"(" y=")" << y << R"(" width=")" << kCell
          << R"(" height=")" << kCell << R"(" fill="rgb()" << shade << "," << shade << R"lit(,255)" stroke="#ccc"/>)lit"
          << "\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
}

}  // namespace belltk::formats
