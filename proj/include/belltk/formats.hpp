#pragma once

// On-disk formats. All writers are deterministic and every reader accepts
// exactly what the matching writer produces, so write -> read -> write is
// byte-identical. See docs/formats.md.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "belltk/bellbasis.hpp"
#include "belltk/certify.hpp"
#include "belltk/hilbert.hpp"
#include "belltk/measurement.hpp"
#include "belltk/tomography.hpp"

namespace belltk::formats {

struct StateFile {
  PureState state;
  ModeWindow window;
};

// { "dim": int, "window": [ints], "amplitudes": [[re, im], ...] }
std::string write_state_json(const PureState& state, const ModeWindow& window);
StateFile read_state_json(const std::string& text);

// { "dim": int, "entries": [[re, im], ...] } row-major, dim^2 entries
std::string write_density_json(const DensityMatrix& rho);
DensityMatrix read_density_json(const std::string& text);

std::string write_diagnostics_json(const TomographyResult& result);

// "pure" + "k" or "superposition" + "k1-k2-degrees"
std::string projector_kind(const ProjectorSpec& p);
std::string projector_params(const ProjectorSpec& p);
ProjectorSpec parse_projector(const std::string& kind, const std::string& params);

// setting_id,projA_kind,projA_params,projB_kind,projB_params,counts,shots
std::string write_counts_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> read_counts_csv(const std::string& text);

// setting_id,projA_kind,projA_params,projB_kind,projB_params,probability
std::string write_probabilities_csv(const std::vector<MeasurementSetting>& settings,
                                    const std::vector<double>& probabilities);
struct ProbabilityTable {
  std::vector<MeasurementSetting> settings;
  std::vector<double> probabilities;
};
ProbabilityTable read_probabilities_csv(const std::string& text);

// Loads either CSV flavour as a tomography problem.
TomographyProblem read_measurement_csv(const std::string& text);

// Plain matrix, one row per line, 17 significant digits.
std::string write_matrix_csv(const RMatrix& m);
RMatrix read_matrix_csv(const std::string& text);

// Labelled overlap table: header "state,<column labels>", then
// "<row label>,<values>". Labels have the form psi_<m>_<n>.
std::string write_overlap_csv(const RMatrix& values, const std::vector<BellIndex>& rows,
                              const std::vector<BellIndex>& cols);
struct LabelledOverlap {
  RMatrix values;
  std::vector<BellIndex> rows;
  std::vector<BellIndex> cols;
};
LabelledOverlap read_overlap_csv(const std::string& text);
// Reorders a square labelled table so rows and columns both follow m * d + n.
OverlapMatrix canonical_overlap(const LabelledOverlap& table);

std::string bell_label(const BellIndex& idx);
std::optional<BellIndex> parse_bell_label(const std::string& text, int d);

// Fixed-grid heatmap. Cell colour for value v clamped to [0, 1]:
// rgb(255(1-v), 255(1-v), 255), i.e. white at 0 and pure blue at 1.
std::string heatmap_svg(const RMatrix& values, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const std::string& title);

std::string format_double(double v);  // %.17g

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace belltk::formats
