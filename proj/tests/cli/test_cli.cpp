// End-to-end checks of the command-line interface: exit codes, file schemas,
// determinism of the data sections, worker-count independence.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(BELLFLOW_CLI_PATH) + " " + args +
                      " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string data_section(const fs::path& file) {
    // everything from the header row on; '#' metadata (timestamps etc.) skipped
    std::ifstream f(file);
    REQUIRE(f.good());
    std::ostringstream out;
    std::string line;
    while (std::getline(f, line))
        if (line.empty() || line[0] != '#') out << line << "\n";
    return out.str();
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("bellflow_cli_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli("trajectory --protocol bogus --steps 10 --stride 1") == 2);
}

TEST_CASE("trajectory runs are deterministic per seed") {
    TempDir d1("traj1"), d2("traj2"), d3("traj3");
    std::string base = "trajectory --protocol swap --z 0.5 --steps 200 "
                       "--stride 20 --dt 1e-3 --seed 99 --out ";
    REQUIRE(run_cli(base + d1.str()) == 0);
    REQUIRE(run_cli(base + d2.str()) == 0);
    CHECK(data_section(d1.path / "trajectory_currents.csv") ==
          data_section(d2.path / "trajectory_currents.csv"));
    CHECK(data_section(d1.path / "trajectory_observables.csv") ==
          data_section(d2.path / "trajectory_observables.csv"));

    // a different seed changes the record
    REQUIRE(run_cli("trajectory --protocol swap --z 0.5 --steps 200 --stride 20 "
                    "--dt 1e-3 --seed 100 --out " + d3.str()) == 0);
    CHECK(data_section(d1.path / "trajectory_currents.csv") !=
          data_section(d3.path / "trajectory_currents.csv"));
}

TEST_CASE("zero-step trajectory emits a header-only record") {
    TempDir d("traj0");
    REQUIRE(run_cli("trajectory --protocol swap --steps 0 --stride 1 --out " +
                    d.str()) == 0);
    CHECK(data_section(d.path / "trajectory_currents.csv") ==
          "time,i_plus,i_minus\n");
}

TEST_CASE("swap trajectory converges to the dark state") {
    // the stationary conditional-state deficit scales with dt; 1e-5 puts the
    // long-run fidelity at ~0.994
    TempDir d("trajss");
    REQUIRE(run_cli("trajectory --protocol swap --z 0.5 --steps 3200000 "
                    "--stride 32000 --dt 1e-5 --seed 1 --out " + d.str()) == 0);
    // time-averaged dark-state fidelity over the final quarter
    std::ifstream f(d.path / "trajectory_observables.csv");
    std::string line;
    std::vector<double> fids;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        auto pos = line.rfind(',');
        fids.push_back(std::stod(line.substr(pos + 1)));
    }
    REQUIRE(fids.size() > 8);
    double acc = 0;
    std::size_t q = fids.size() / 4;
    for (std::size_t i = fids.size() - q; i < fids.size(); ++i) acc += fids[i];
    CHECK(acc / q >= 0.99);
}

TEST_CASE("swap sweep emits stable schemas and the known cell value") {
    TempDir d("sweep");
    std::ofstream cfg(d.path / "cfg.json");
    cfg << R"({"z_grid": [0.5], "eta_grid": [1.0]})";
    cfg.close();
    REQUIRE(run_cli("swap-sweep --config " + (d.path / "cfg.json").string() +
                    " --out " + d.str()) == 0);
    std::string data = data_section(d.path / "swap_sweep_formula.csv");
    CHECK(data.find("z,eta,gain_plus,gain_minus,log_negativity,"
                    "fidelity_dark_state,kernel_dim") == 0);
    CHECK(data.find("0.847996") != std::string::npos);
    CHECK(fs::exists(d.path / "swap_sweep_optimized.csv"));
    CHECK(fs::exists(d.path / "swap_entanglement_vs_z.svg"));
    CHECK(fs::exists(d.path / "swap_entanglement_surface.svg"));
    CHECK(fs::exists(d.path / "swap_entanglement_vs_eta.svg"));
}

TEST_CASE("sweep output is independent of the worker count") {
    TempDir d1("w1"), d2("w2");
    std::ofstream cfg(d1.path / "cfg.json");
    cfg << R"({"z_grid": [0.2, 0.5, 0.8], "eta_grid": [0.9, 1.0]})";
    cfg.close();
    fs::copy_file(d1.path / "cfg.json", d2.path / "cfg.json");
    REQUIRE(run_cli("swap-sweep --formula-only --workers 1 --config " +
                    (d1.path / "cfg.json").string() + " --out " + d1.str()) == 0);
    REQUIRE(run_cli("swap-sweep --formula-only --workers 4 --config " +
                    (d2.path / "cfg.json").string() + " --out " + d2.str()) == 0);
    CHECK(data_section(d1.path / "swap_sweep_formula.csv") ==
          data_section(d2.path / "swap_sweep_formula.csv"));
}

TEST_CASE("empty grids are usage errors") {
    TempDir d("empty");
    std::ofstream cfg(d.path / "cfg.json");
    cfg << R"({"z_grid": [], "eta_grid": [1.0]})";
    cfg.close();
    CHECK(run_cli("swap-sweep --config " + (d.path / "cfg.json").string() +
                  " --out " + d.str()) == 2);
}

TEST_CASE("om sweep emits the reference values") {
    TempDir d("om");
    std::ofstream cfg(d.path / "cfg.json");
    cfg << R"({"cooperativity_grid": [1.0, 5.0, 20.0],
               "nbar_grid": [0.0, 1000.0],
               "kappa_over_omega_grid": [0.1]})";
    cfg.close();
    REQUIRE(run_cli("om-sweep --config " + (d.path / "cfg.json").string() +
                    " --squeeze-db -6 --out " + d.str()) == 0);
    std::string data = data_section(d.path / "om_sweep.csv");
    CHECK(data.find("cooperativity,nbar,kappa_over_omega_m,zeta_db,gamma_plus,"
                    "gamma_minus,epsilon,reason") == 0);
    // c_crit echoed as metadata
    std::ifstream f(d.path / "om_sweep.csv");
    std::string all((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
    CHECK(all.find("c_crit = 2.67") != std::string::npos);
    CHECK(fs::exists(d.path / "om_squeezing_vs_cooperativity.svg"));
}

TEST_CASE("om sweep records non-converged cells as NaN rows with a reason") {
    TempDir d("omnan");
    std::ofstream cfg(d.path / "cfg.json");
    // gamma = 0 makes every cell g = 0 with no damping: no steady state
    cfg << R"({"cooperativity_grid": [1.0], "nbar_grid": [0.0],
               "kappa_over_omega_grid": [1.0], "gamma": 0.0})";
    cfg.close();
    REQUIRE(run_cli("om-sweep --config " + (d.path / "cfg.json").string() +
                    " --out " + d.str()) == 0);
    std::string data = data_section(d.path / "om_sweep.csv");
    CHECK(data.find("nan") != std::string::npos);
    CHECK(data.find("Hurwitz") != std::string::npos);
}

TEST_CASE("teleport study emits vacuum and squeezed rows") {
    TempDir d("tp");
    std::ofstream cfg(d.path / "cfg.json");
    cfg << R"({"db_grid": [0.0, -6.0], "fock_dim": 20})";
    cfg.close();
    REQUIRE(run_cli("teleport --config " + (d.path / "cfg.json").string() +
                    " --out " + d.str()) == 0);
    std::string data = data_section(d.path / "teleport_steady_state.csv");
    CHECK(data.find("squeeze_db,N,purity") == 0);
    CHECK(fs::exists(d.path / "teleport_min_variance.svg"));
}

TEST_CASE("validate passes with defaults and exits 0") {
    TempDir d("val");
    CHECK(run_cli("validate --trajectories 150 --seed 3 --out " + d.str()) == 0);
    CHECK(fs::exists(d.path / "validate_report.csv"));
}

TEST_CASE("validate catches an injected channel-sign corruption") {
    TempDir d("valbad");
    CHECK(run_cli("validate --trajectories 150 --seed 3 --inject-nu-sign-flip "
                  "--out " + d.str()) == 1);
}

TEST_CASE("tightened tolerances report which invariants fail") {
    TempDir d("tight");
    // 1e-6 scale pushes the exact-arithmetic checks below machine precision
    int rc = run_cli("validate --trajectories 150 --seed 3 "
                     "--tolerance-scale 1e-6 --out " + d.str());
    CHECK(rc == 1);
    std::string data = data_section(d.path / "validate_report.csv");
    CHECK(data.find(",0,") != std::string::npos);  // at least one failing row
}
