#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// End-to-end checks of the installed command line binary: each case shells
// out to the real executable and inspects exit codes and emitted files.
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kBin{PHOTONIC_CLI_BIN};

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

RunResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path out_file = workdir / "stdout.txt";
    std::ostringstream cmd;
    cmd << "cd " << workdir << " && " << kBin << ' ' << args << " > " << out_file
        << " 2> /dev/null";
    const int raw = std::system(cmd.str().c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(out_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    r.output = buf.str();
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("help and usage errors") {
    const fs::path dir = fresh_dir("cli_help");
    CHECK(run_cli("--help", dir).exit_code == 0);
    CHECK(run_cli("design-coupler --help", dir).exit_code == 0);
    CHECK(run_cli("", dir).exit_code == 2);               // missing subcommand
    CHECK(run_cli("no-such-command", dir).exit_code == 2);
    CHECK(run_cli("design-coupler", dir).exit_code == 2);  // missing required flag
    CHECK(run_cli("design-coupler --c-target 0.5 --bogus 1", dir).exit_code == 2);
}

TEST_CASE("design-coupler emits ranked candidates") {
    const fs::path dir = fresh_dir("cli_design");
    const RunResult r = run_cli("design-coupler --c-target 0.5 --output design.json", dir);
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.output);
    CHECK(doc["candidates"].size() == 6);  // k = 0..2, both branches
    CHECK(doc["chosen"]["l_int_um"].get<double>() == doctest::Approx(8.65).epsilon(1e-6));
    CHECK(doc["chosen"]["valid"].get<bool>());
    // The mirrored file matches what went to stdout.
    std::ifstream mirror(dir / "design.json");
    const json mirrored = json::parse(mirror);
    CHECK(mirrored == doc);
    // A target no candidate can reach at k-max 0 on the minus branch only.
    CHECK(run_cli("design-coupler --c-target 0.999 --k-max 0 --ell-0 40", dir).exit_code == 1);
}

TEST_CASE("config file supplies defaults that flags override") {
    const fs::path dir = fresh_dir("cli_config");
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"c-target": 0.3, "k-max": 1})";
    }
    const RunResult base = run_cli("design-coupler --config cfg.json", dir);
    REQUIRE(base.exit_code == 0);
    const json base_doc = json::parse(base.output);
    CHECK(base_doc["c_target"].get<double>() == doctest::Approx(0.3));
    CHECK(base_doc["candidates"].size() == 4);  // k = 0..1

    const RunResult override_run =
        run_cli("design-coupler --config cfg.json --c-target 0.6", dir);
    REQUIRE(override_run.exit_code == 0);
    const json over_doc = json::parse(override_run.output);
    CHECK(over_doc["c_target"].get<double>() == doctest::Approx(0.6));

    CHECK(run_cli("design-coupler --config missing.json --c-target 0.5", dir).exit_code == 2);
    {
        std::ofstream cfg(dir / "broken.json");
        cfg << "not json";
    }
    CHECK(run_cli("design-coupler --config broken.json --c-target 0.5", dir).exit_code == 2);
}

TEST_CASE("synthesize then fit a ring through the binary") {
    const fs::path dir = fresh_dir("cli_ring");
    REQUIRE(run_cli("synth ring --output ring.csv --seed 7", dir).exit_code == 0);
    const RunResult fit = run_cli(
        "fit-ring --input ring.csv --output fit.json --curve curve.csv", dir);
    REQUIRE(fit.exit_code == 0);
    const json doc = json::parse(fit.output);
    CHECK(doc["fit"]["converged"].get<bool>());
    CHECK(doc["fit"]["parameters"]["lambda0_nm"].get<double>() ==
          doctest::Approx(1552.0).epsilon(1e-5));
    CHECK(fs::exists(dir / "fit.json"));
    std::ifstream curve(dir / "curve.csv");
    std::string header;
    REQUIRE(std::getline(curve, header));
    CHECK(header == "wavelength_nm,measured,fitted");
    // Same seed, same bytes: the generator is pinned.
    REQUIRE(run_cli("synth ring --output ring2.csv --seed 7", dir).exit_code == 0);
    std::ifstream a(dir / "ring.csv"), b(dir / "ring2.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    // Degenerate input data exits with the domain-error code.
    {
        std::ofstream flat(dir / "flat.csv");
        flat << "wavelength_nm,value\n";
        for (int i = 0; i < 100; ++i) flat << 1550.0 + 0.01 * i << ",0.5\n";
    }
    CHECK(run_cli("fit-ring --input flat.csv", dir).exit_code == 1);
}

TEST_CASE("mzi pipeline through the binary") {
    const fs::path dir = fresh_dir("cli_mzi");
    REQUIRE(run_cli("synth mzi-pair", dir).exit_code == 0);
    const RunResult fit =
        run_cli("fit-mzi-phase --left mzi_left.csv --right mzi_right.csv", dir);
    REQUIRE(fit.exit_code == 0);
    const json doc = json::parse(fit.output);
    CHECK(doc["phase_over_pi"].get<double>() == doctest::Approx(0.5).epsilon(0.04));
    // The symmetric reference shows overlapping fringes: phase zero.
    REQUIRE(run_cli("synth mzi-pair --kind symmetric --output-left sl.csv --output-right sr.csv",
                    dir)
                .exit_code == 0);
    const RunResult sym = run_cli("fit-mzi-phase --left sl.csv --right sr.csv", dir);
    REQUIRE(sym.exit_code == 0);
    CHECK(std::abs(json::parse(sym.output)["phase_over_pi"].get<double>()) < 0.02);
}

TEST_CASE("insertion pipeline through the binary") {
    const fs::path dir = fresh_dir("cli_insertion");
    REQUIRE(run_cli("synth insertion-chip --output-dir chip --n-duts 8", dir).exit_code == 0);
    const RunResult cal = run_cli(
        "calibrate-insertion --manifest chip/manifest.json --box-data box.csv", dir);
    REQUIRE(cal.exit_code == 0);
    const json doc = json::parse(cal.output);
    CHECK(doc["devices"].size() == 8);
    CHECK(std::abs(doc["corrected"]["mean_db"].get<double>() - 0.06) < 0.1);
    std::ifstream box(dir / "box.csv");
    std::string header;
    REQUIRE(std::getline(box, header));
    CHECK(header == "device,corrected_db,uncorrected_db");
}

TEST_CASE("gate commands through the binary") {
    const fs::path dir = fresh_dir("cli_gate");
    const RunResult ideal = run_cli("cnot-report", dir);
    REQUIRE(ideal.exit_code == 0);
    const json doc = json::parse(ideal.output);
    CHECK(doc["fidelity"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(doc["success_prob"].get<double>() == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
    CHECK(run_cli("cnot-report --c-half 1.0", dir).exit_code == 1);

    REQUIRE(run_cli("synth cnot-matrix --c-half 0.48 --c-twothirds 0.67 --noise 0", dir)
                .exit_code == 0);
    const RunResult fit = run_cli("fit-cnot --input cnot_matrix.csv", dir);
    REQUIRE(fit.exit_code == 0);
    const json fdoc = json::parse(fit.output);
    CHECK(fdoc["fit"]["parameters"]["c_half"].get<double>() == doctest::Approx(0.48).epsilon(1e-4));
    CHECK(fdoc["fit"]["parameters"]["c_twothirds"].get<double>() ==
          doctest::Approx(0.67).epsilon(1e-4));
}

TEST_CASE("small fidelity map through the binary") {
    const fs::path dir = fresh_dir("cli_map");
    const RunResult map = run_cli(
        "fidelity-map --n-half 9 --n-twothirds 9 --output map.csv --gnuplot map.gp "
        "--fitted-c-half 0.477 --fitted-c-twothirds 0.676",
        dir);
    REQUIRE(map.exit_code == 0);
    const json doc = json::parse(map.output);
    CHECK(doc["max_fidelity"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(doc["ideal_cell"]["c_half"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(doc.contains("fitted_cell"));
    std::ifstream csv(dir / "map.csv");
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header == "C_half,C_twothirds,fidelity,success_prob");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 81);
    CHECK(fs::exists(dir / "map.gp"));
    CHECK(run_cli("fidelity-map --fitted-c-half 0.5", dir).exit_code == 2);
}
