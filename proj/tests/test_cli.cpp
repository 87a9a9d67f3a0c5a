#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "json.hpp"

#include "belltk/bellbasis.hpp"
#include "belltk/certify.hpp"
#include "belltk/cli.hpp"
#include "belltk/formats.hpp"
#include "belltk/tomography.hpp"

using namespace belltk;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("belltk_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) { return formats::read_text_file(p); }

// Every regular file under `dir`, relative path -> contents.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return files;
}

std::size_t count_files(const fs::path& dir, const std::string& suffix) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) ++n;
  }
  return n;
}

const std::string kTable = std::string(BELLTK_SOURCE_DIR) + "/data/table1_overlap.csv";

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"basis", "--d", "1"}).code == cli::kExitUsage);
  CHECK(run({"basis", "--convention", "sideways"}).code == cli::kExitUsage);
  CHECK(run({"simulate"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("basis") {
  const fs::path dir = scratch("basis");
  REQUIRE(run({"basis", "--d", "4", "--out", dir.string()}).code == 0);
  CHECK(count_files(dir, ".json") == 16);
  const RMatrix gram = formats::read_matrix_csv(slurp(dir / "gram.csv"));
  CHECK((gram - RMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-12);
  const auto first = snapshot(dir);
  REQUIRE(run({"basis", "--d", "4", "--out", dir.string()}).code == 0);
  CHECK(snapshot(dir) == first);

  const fs::path two = scratch("basis2");
  REQUIRE(run({"basis", "--d", "2", "--convention", "plus", "--out", two.string()}).code == 0);
  CHECK(count_files(two, ".json") == 4);
}

TEST_CASE("generate") {
  const fs::path dir = scratch("generate");
  REQUIRE(run({"generate", "--out", dir.string()}).code == 0);
  CHECK(count_files(dir, ".json") == 17);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  REQUIRE(manifest["states"].size() == 16);
  for (const auto& s : manifest["states"]) {
    CHECK(s["fidelity_to_ideal"].get<double>() >= 1 - 1e-10);
    const BellIndex idx(4, s["m"].get<int>(), s["n"].get<int>());
    const auto file = formats::read_state_json(slurp(dir / s["file"].get<std::string>()));
    CHECK(std::norm(inner_product(bell_state_minus(idx), file.state)) >= 1 - 1e-10);
  }
  CHECK_FALSE(manifest.contains("created"));
  const auto first = snapshot(dir);
  REQUIRE(run({"generate", "--out", dir.string()}).code == 0);
  CHECK(snapshot(dir) == first);

  SUBCASE("gaussian spectrum logs efficiencies below one") {
    const fs::path g = scratch("generate_gauss");
    REQUIRE(run({"generate", "--profile", "gaussian", "--sigma", "2", "--out", g.string()}).code == 0);
    const auto m = nlohmann::json::parse(slurp(g / "manifest.json"));
    bool some_lossy = false;
    for (const auto& s : m["states"]) {
      CHECK(s["fidelity_to_ideal"].get<double>() >= 1 - 1e-10);
      some_lossy = some_lossy || s["filter_efficiency"].get<double>() < 1.0;
    }
    CHECK(some_lossy);
  }
  SUBCASE("initial group states only") {
    const fs::path g = scratch("generate_groups");
    REQUIRE(run({"generate", "--n", "0", "--out", g.string()}).code == 0);
    CHECK(count_files(g, ".json") == 5);
    CHECK(fs::exists(g / "psi_3_0.json"));
  }
  SUBCASE("gate on the idler and pauli Z") {
    for (const auto& gate : {"dove", "pauli_z"}) {
      const fs::path g = scratch(std::string("generate_b_") + gate);
      REQUIRE(run({"generate", "--party", "B", "--gate", gate, "--out", g.string()}).code == 0);
      for (const auto& s : nlohmann::json::parse(slurp(g / "manifest.json"))["states"]) {
        CHECK(s["fidelity_to_ideal"].get<double>() >= 1 - 1e-10);
      }
    }
  }
  SUBCASE("timestamp confined to the manifest") {
    const fs::path g = scratch("generate_stamp");
    REQUIRE(run({"generate", "--stamp", "--out", g.string()}).code == 0);
    CHECK(nlohmann::json::parse(slurp(g / "manifest.json")).contains("created"));
    auto stamped = snapshot(g);
    auto plain = first;
    stamped.erase("manifest.json");
    plain.erase("manifest.json");
    CHECK(stamped == plain);
  }
  SUBCASE("bad config") {
    const fs::path cfg = scratch("bad_config.json");
    formats::write_text_file(cfg, R"({"spectrum": {"profile": "lorentzian"}})");
    CHECK(run({"generate", "--config", cfg.string(), "--out", scratch("unused").string()}).code == cli::kExitData);
  }
}

TEST_CASE("simulate, reconstruct, certify, report") {
  const fs::path states = scratch("pipeline_states");
  REQUIRE(run({"generate", "--out", states.string()}).code == 0);

  SUBCASE("single file determinism and probabilities") {
    const fs::path out = scratch("sim_single");
    const std::string state = (states / "psi_2_1.json").string();
    REQUIRE(run({"simulate", "--state", state, "--out", (out / "a.csv").string(), "--probabilities",
                 (out / "p.csv").string(), "--epsilon", "0"})
                .code == 0);
    REQUIRE(run({"simulate", "--state", state, "--out", (out / "b.csv").string()}).code == 0);
    CHECK(slurp(out / "a.csv") == slurp(out / "b.csv"));
    REQUIRE(run({"simulate", "--state", state, "--out", (out / "c.csv").string(), "--seed", "8"}).code == 0);
    CHECK(slurp(out / "a.csv") != slurp(out / "c.csv"));

    const auto table = formats::read_probabilities_csv(slurp(out / "p.csv"));
    const auto file = formats::read_state_json(slurp(state));
    const auto expect = forward_probabilities(DensityMatrix::from_pure(file.state), table.settings);
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(table.probabilities[i] == doctest::Approx(expect[i]).epsilon(1e-15));

    const fs::path rho = scratch("tomo_single");
    REQUIRE(run({"tomo", "--counts", (out / "p.csv").string(), "--out", rho.string()}).code == 0);
    const auto exact = formats::read_density_json(slurp(rho / "p.rho.json"));
    CHECK(fidelity(exact, bell_state_minus(BellIndex(4, 2, 1))) >= 0.999);
    REQUIRE(run({"tomo", "--counts", (out / "a.csv").string(), "--out", rho.string()}).code == 0);
    const auto noisy = formats::read_density_json(slurp(rho / "a.rho.json"));
    CHECK(fidelity(noisy, bell_state_minus(BellIndex(4, 2, 1))) >= 0.98);
    const auto diag = nlohmann::json::parse(slurp(rho / "a.diagnostics.json"));
    CHECK(diag["converged"].get<bool>());
  }

  SUBCASE("crosstalk lowers the reconstructed fidelity") {
    const fs::path out = scratch("sim_crosstalk");
    const std::string state = (states / "psi_0_0.json").string();
    REQUIRE(run({"simulate", "--state", state, "--epsilon", "0.1", "--out", (out / "noisy.counts.csv").string()}).code == 0);
    REQUIRE(run({"tomo", "--counts", (out / "noisy.counts.csv").string(), "--out", out.string()}).code == 0);
    const auto rho = formats::read_density_json(slurp(out / "noisy.rho.json"));
    CHECK(fidelity(rho, bell_state_minus(BellIndex(4, 0, 0))) < 0.95);
  }

  SUBCASE("informationally incomplete data") {
    const fs::path out = scratch("sim_incomplete");
    REQUIRE(run({"simulate", "--state", (states / "psi_0_0.json").string(), "--out", (out / "all.csv").string()}).code == 0);
    std::istringstream in(slurp(out / "all.csv"));
    std::string line;
    std::string kept;
    std::getline(in, line);
    kept = line + "\n";
    while (std::getline(in, line)) {
      if (line.find("superposition") == std::string::npos) kept += line + "\n";
    }
    formats::write_text_file(out / "pure.csv", kept);
    const Run r = run({"tomo", "--counts", (out / "pure.csv").string(), "--out", out.string()});
    CHECK(r.code == cli::kExitData);
    CHECK(r.err.find("rank 16") != std::string::npos);
  }

  SUBCASE("iteration cap exits with the solver code and still writes") {
    const fs::path out = scratch("sim_cap");
    REQUIRE(run({"simulate", "--state", (states / "psi_1_1.json").string(), "--out", (out / "x.csv").string()}).code == 0);
    const Run r = run({"tomo", "--counts", (out / "x.csv").string(), "--max-iters", "1", "--tol", "0", "--out", out.string()});
    CHECK(r.code == cli::kExitNoConvergence);
    CHECK(fs::exists(out / "x.rho.json"));
    CHECK_FALSE(nlohmann::json::parse(slurp(out / "x.diagnostics.json"))["converged"].get<bool>());
  }

  SUBCASE("missing inputs") {
    CHECK(run({"simulate", "--state", "/nonexistent/psi.json"}).code == cli::kExitData);
    CHECK(run({"tomo", "--counts", "/nonexistent/c.csv"}).code == cli::kExitData);
    CHECK(run({"certify", "--rho", "/nonexistent"}).code == cli::kExitData);
    CHECK(run({"certify"}).code == cli::kExitData);
  }

  SUBCASE("directory pipeline") {
    const fs::path counts = scratch("dir_counts");
    const fs::path rho = scratch("dir_rho");
    REQUIRE(run({"simulate", "--state", states.string(), "--out", counts.string()}).code == 0);
    CHECK(count_files(counts, ".counts.csv") == 16);
    const auto counts_first = snapshot(counts);
    REQUIRE(run({"simulate", "--state", states.string(), "--out", counts.string()}).code == 0);
    CHECK(snapshot(counts) == counts_first);

    REQUIRE(run({"tomo", "--counts", counts.string(), "--out", rho.string()}).code == 0);
    CHECK(count_files(rho, ".rho.json") == 16);
    const auto rho_first = snapshot(rho);
    REQUIRE(run({"tomo", "--counts", counts.string(), "--out", rho.string()}).code == 0);
    CHECK(snapshot(rho) == rho_first);

    const fs::path cert = scratch("dir_cert");
    REQUIRE(run({"certify", "--rho", rho.string(), "--out", cert.string()}).code == 0);
    const auto report = nlohmann::json::parse(slurp(cert / "report.json"));
    CHECK(report["all_pass"].get<bool>());
    CHECK(report["min_d_ent"].get<int>() == 4);
    CHECK(report["states"].size() == 16);
    const auto overlap = formats::read_overlap_csv(slurp(cert / "overlap.csv"));
    for (int i = 0; i < 16; ++i) CHECK(overlap.values(i, i) >= 0.98);
    CHECK(fs::exists(cert / "overlap.svg"));

    const Run rep = run({"report", "--dir", cert.string()});
    REQUIRE(rep.code == 0);
    CHECK(rep.out.find("psi_3_3") != std::string::npos);
    CHECK(rep.out.find("mutual information") != std::string::npos);
    CHECK(rep.out.find("dimensionality (min): 4") != std::string::npos);
    const auto cert_first = snapshot(cert);
    REQUIRE(run({"certify", "--rho", rho.string(), "--out", cert.string()}).code == 0);
    REQUIRE(run({"report", "--dir", cert.string()}).code == 0);
    CHECK(snapshot(cert) == cert_first);
  }
}

TEST_CASE("certify ideal states and a single file") {
  const fs::path basis = scratch("ideal_basis");
  REQUIRE(run({"basis", "--out", basis.string()}).code == 0);
  const fs::path rho = scratch("ideal_rho");
  for (int f = 0; f < 16; ++f) {
    const BellIndex idx = BellIndex::from_flat(4, f);
    const auto s = formats::read_state_json(slurp(basis / (formats::bell_label(idx) + ".json")));
    formats::write_text_file(rho / (formats::bell_label(idx) + ".rho.json"),
                             formats::write_density_json(DensityMatrix::from_pure(s.state)));
  }
  const fs::path cert = scratch("ideal_cert");
  REQUIRE(run({"certify", "--rho", rho.string(), "--out", cert.string()}).code == 0);
  const RMatrix m = formats::read_overlap_csv(slurp(cert / "overlap.csv")).values;
  CHECK((m - RMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-12);

  formats::write_text_file(rho / "unlabelled.json",
                           formats::write_density_json(DensityMatrix::from_pure(bell_state_minus(BellIndex(4, 1, 2)))));
  CHECK(run({"certify", "--rho", (rho / "unlabelled.json").string(), "--out", cert.string()}).code == cli::kExitData);
  REQUIRE(run({"certify", "--rho", (rho / "unlabelled.json").string(), "--target", "1,2", "--out", cert.string()}).code == 0);
  const auto report = nlohmann::json::parse(slurp(cert / "report.json"));
  CHECK(report["states"][0]["fidelity"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("certify and report the shipped overlap table") {
  const fs::path cert = scratch("table");
  REQUIRE(run({"certify", "--table", kTable, "--out", cert.string()}).code == 0);
  const auto report = nlohmann::json::parse(slurp(cert / "report.json"));
  CHECK(std::abs(report["mean_fidelity"].get<double>() - 0.821) <= 1e-3);
  CHECK(report["all_pass"].get<bool>());
  CHECK(report["mutual_information_bits"].get<double>() == doctest::Approx(2.5353002444137474).epsilon(1e-12));
  const Run rep = run({"report", "--dir", cert.string()});
  CHECK(rep.code == 0);
  CHECK(fs::exists(cert / "summary.svg"));
  CHECK(slurp(cert / "summary.txt") == rep.out);
}

TEST_CASE("report on an empty directory") {
  const fs::path empty = scratch("empty");
  fs::create_directories(empty);
  CHECK(run({"report", "--dir", empty.string()}).code == cli::kExitData);
  CHECK(run({"report", "--dir", (empty / "missing").string()}).code == cli::kExitData);
}

TEST_CASE("installed binary exit codes") {
  const char* bin = std::getenv("BELLTK_BIN");
  if (bin == nullptr) return;
  const std::string base = std::string("\"") + bin + "\"";
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status(base + " --help") == 0);
  CHECK(status(base + " nonsense") == 2);
  CHECK(status(base + " report --dir /nonexistent") == 3);
  const fs::path dir = scratch("bin_basis");
  CHECK(status(base + " basis --out " + dir.string()) == 0);
}
