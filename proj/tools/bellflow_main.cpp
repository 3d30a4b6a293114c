// bellflow command-line front end: protocol sweeps, single trajectories, and
// the validation suite. JSON config plus flag overrides; flags win. All data
// goes to CSV (SVG plots are companions, never the only output).

#include "bellflow/csv.hpp"
#include "bellflow/sweeps.hpp"
#include "bellflow/validate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

using nlohmann::json;
namespace bf = bellflow;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int workers = 0;
    double dt = 1e-3;
    long fock_dim = 30;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--config", c.config_path, "JSON config file (flags win)");
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--seed", c.seed, "RNG seed for stochastic runs");
    cmd->add_option("--workers", c.workers,
                    "worker count (default: BELLFLOW_WORKERS or hardware)");
    cmd->add_option("--dt", c.dt, "integrator time step");
    cmd->add_option("--fock-dim", c.fock_dim, "bosonic truncation dimension");
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    f >> j;
    if (!j.is_object()) throw CLI::ValidationError("--config", "expected an object");
    return j;
}

// config value unless the flag was given explicitly
template <typename T>
T pick(const CLI::App* cmd, const std::string& flag, const json& cfg,
       const std::string& key, T current) {
    if (cmd->count(flag) > 0) return current;
    if (cfg.contains(key)) return cfg[key].get<T>();
    return current;
}

std::vector<double> grid_from(const json& cfg, const std::string& key,
                              std::vector<double> fallback) {
    if (!cfg.contains(key)) return fallback;
    const json& g = cfg[key];
    if (g.is_array()) return g.get<std::vector<double>>();
    return bf::sweeps::linspace(g.at("min").get<double>(), g.at("max").get<double>(),
                                g.at("n").get<int>());
}

std::vector<std::string> echo_lines(const std::string& command, const json& cfg,
                                    const CommonOpts& c) {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    std::vector<std::string> lines;
    lines.push_back("bellflow " + command);
    lines.push_back(std::string("generated: ") + buf);  // excluded from data section
    lines.push_back("seed = " + std::to_string(c.seed) +
                    ", workers = " + std::to_string(c.workers));
    if (!cfg.empty()) lines.push_back("config: " + cfg.dump());
    return lines;
}

int run_swap_sweep(const CLI::App* cmd, CommonOpts& c, bool formula_only) {
    json cfg = load_config(c.config_path);
    bf::sweeps::SwapSweepConfig sc;
    sc.z_grid = grid_from(cfg, "z_grid", bf::sweeps::linspace(0.0, 0.95, 21));
    sc.eta_grid = grid_from(cfg, "eta_grid", bf::sweeps::linspace(0.5, 1.0, 21));
    sc.optimize = !formula_only;
    sc.workers = c.workers;
    if (sc.z_grid.empty() || sc.eta_grid.empty())
        throw CLI::ValidationError("grid", "empty sweep grid");
    for (double z : sc.z_grid)
        if (z < 0.0 || z >= 1.0)
            throw CLI::ValidationError("z_grid", "z must be in [0, 1)");
    auto res = bf::sweeps::run_swap_sweep(sc);
    bf::sweeps::write_swap_sweep(res, sc, c.out_dir,
                                 echo_lines(cmd->get_name(), cfg, c));
    std::cout << "swap sweep: " << res.formula.size() << " cells -> " << c.out_dir
              << "\n";
    return 0;
}

int run_om_sweep(const CLI::App* cmd, CommonOpts& c, double squeeze_db,
                 double squeeze_phase, double gamma) {
    json cfg = load_config(c.config_path);
    bf::sweeps::OMSweepConfig oc;
    oc.cooperativity_grid =
        grid_from(cfg, "cooperativity_grid", bf::sweeps::logspace(0.2, 200.0, 41));
    oc.nbar_grid = grid_from(cfg, "nbar_grid", {0.0, 0.1, 0.5, 1000.0});
    oc.kappa_over_omega_grid = grid_from(cfg, "kappa_over_omega_grid", {1.0, 10.0});
    oc.squeeze_db = pick(cmd, "--squeeze-db", cfg, "squeeze_db", squeeze_db);
    oc.squeeze_phase =
        pick(cmd, "--squeeze-phase", cfg, "squeeze_phase", squeeze_phase);
    oc.gamma = pick(cmd, "--gamma", cfg, "gamma", gamma);
    oc.workers = c.workers;
    auto res = bf::sweeps::run_om_sweep(oc);
    bf::sweeps::write_om_sweep(res, oc, c.out_dir,
                               echo_lines(cmd->get_name(), cfg, c));
    std::cout << "om sweep: " << res.cells.size() << " cells, c_crit = "
              << bf::csv::format_double(res.c_crit) << " -> " << c.out_dir << "\n";
    return 0;
}

int run_teleport(const CLI::App* cmd, CommonOpts& c, double eta,
                 double squeeze_phase) {
    json cfg = load_config(c.config_path);
    bf::sweeps::TeleportStudyConfig tc;
    tc.db_grid = grid_from(cfg, "db_grid", bf::sweeps::linspace(-8.0, 0.0, 17));
    tc.eta = pick(cmd, "--eta", cfg, "eta", eta);
    tc.squeeze_phase =
        pick(cmd, "--squeeze-phase", cfg, "squeeze_phase", squeeze_phase);
    tc.fock_dim = pick(cmd, "--fock-dim", cfg, "fock_dim", c.fock_dim);
    auto rows = bf::sweeps::run_teleport_study(tc);
    bf::sweeps::write_teleport_study(rows, tc, c.out_dir,
                                     echo_lines(cmd->get_name(), cfg, c));
    std::cout << "teleport study: " << rows.size() << " rows -> " << c.out_dir
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "bellflow: continuous Bell-measurement simulation toolkit.\n"
        "CSV schemas: swap-sweep -> (z, eta, gain_plus, gain_minus,\n"
        "log_negativity, fidelity_dark_state, kernel_dim); om-sweep ->\n"
        "(cooperativity, nbar, kappa_over_omega_m, zeta_db, gamma_plus,\n"
        "gamma_minus, epsilon, reason); teleport -> (squeeze_db, N, purity,\n"
        "fidelity_vacuum, min_variance, target_min_variance, jump_rate,\n"
        "expected_rate, jump_match, kernel_dim); trajectory -> currents\n"
        "(time, i_plus, i_minus) and observables (time, ...)."};
    app.require_subcommand(1);

    CommonOpts c;

    auto* swap = app.add_subcommand("swap-sweep",
                                    "entanglement-swap surface over (z, eta)");
    bool formula_only = false;
    add_common(swap, c);
    swap->add_flag("--formula-only", formula_only,
                   "skip gain optimization (formula gains only)");

    auto* om = app.add_subcommand("om-sweep",
                                  "mechanical squeezing vs cooperativity");
    double squeeze_db = -6.0, squeeze_phase = 0.0, gamma = 1e-6;
    add_common(om, c);
    om->add_option("--squeeze-db", squeeze_db, "input squeezing level (dB <= 0)");
    om->add_option("--squeeze-phase", squeeze_phase,
                   "phase of the squeezing correlation M (radians)");
    om->add_option("--gamma", gamma, "mechanical linewidth");

    auto* tp = app.add_subcommand("teleport",
                                  "steady-state teleportation study vs input dB");
    double tp_eta = 1.0, tp_phase = 0.0;
    add_common(tp, c);
    tp->add_option("--eta", tp_eta, "detection efficiency in (0, 1]");
    tp->add_option("--squeeze-phase", tp_phase,
                   "phase of the squeezing correlation M (radians)");

    auto* tr = app.add_subcommand("trajectory", "one conditional trajectory");
    bf::sweeps::TrajectoryRunConfig trc;
    long n_steps = 1000, stride = 10;
    bool no_feedback = false;
    add_common(tr, c);
    tr->add_option("--protocol", trc.protocol, "swap | teleport | om");
    tr->add_option("--steps", n_steps, "number of steps");
    tr->add_option("--stride", stride, "snapshot stride (must divide steps)");
    tr->add_option("--z", trc.z, "swap interaction parameter");
    tr->add_option("--eta", trc.eta, "efficiency");
    tr->add_option("--squeeze-db", trc.squeeze_db, "input squeezing (dB <= 0)");
    tr->add_option("--squeeze-phase", trc.squeeze_phase,
                   "phase of the squeezing correlation M (radians)");
    tr->add_option("--om-cooperativity", trc.om_cooperativity, "cooperativity");
    tr->add_option("--om-nbar", trc.om_nbar, "bath occupation");
    tr->add_option("--om-kappa-over-omega", trc.om_kappa_over_omega,
                   "sideband resolution");
    tr->add_option("--om-gamma", trc.om_gamma, "mechanical linewidth");
    tr->add_flag("--no-feedback", no_feedback, "conditional evolution only");

    auto* val = app.add_subcommand("validate", "run the invariant suite");
    bf::validate::ValidateOptions vo;
    add_common(val, c);
    val->add_option("--tolerance-scale", vo.tolerance_scale,
                    "scale every threshold (e.g. 0.1 tightens 10x)");
    val->add_option("--trajectories", vo.sme_trajectories,
                    "ensemble size for the stochastic check");
    val->add_flag("--inject-nu-sign-flip", vo.inject_nu_sign_flip,
                  "test hook: corrupt the dW- channel sign")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (swap->parsed()) return run_swap_sweep(swap, c, formula_only);
        if (om->parsed())
            return run_om_sweep(om, c, squeeze_db, squeeze_phase, gamma);
        if (tp->parsed()) return run_teleport(tp, c, tp_eta, tp_phase);

        if (tr->parsed()) {
            json cfg = load_config(c.config_path);
            trc.traj.dt = c.dt;
            trc.traj.n_steps = n_steps;
            trc.traj.seed = c.seed;
            trc.traj.record_stride = stride;
            trc.feedback = !no_feedback;
            trc.fock_dim = c.fock_dim;
            auto out = bf::sweeps::run_trajectory_protocol(
                trc, echo_lines("trajectory", cfg, c));
            std::filesystem::create_directories(c.out_dir);
            out.currents.write(c.out_dir + "/trajectory_currents.csv");
            out.observables.write(c.out_dir + "/trajectory_observables.csv");
            std::cout << "trajectory: " << n_steps << " steps, "
                      << out.psd_projections << " positivity projections -> "
                      << c.out_dir << "\n";
            return 0;
        }

        if (val->parsed()) {
            vo.seed = c.seed;
            vo.workers = c.workers;
            auto results = bf::validate::run_all(vo);
            bool all_pass = true;
            bf::csv::Table t({"check", "pass", "value", "threshold", "detail"});
            for (const auto& r : results) {
                all_pass = all_pass && r.pass;
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.name
                          << "  value=" << bf::csv::format_double(r.value)
                          << " threshold=" << bf::csv::format_double(r.threshold)
                          << (r.detail.empty() ? "" : "  [" + r.detail + "]")
                          << "\n";
                t.add_row_strings({r.name, r.pass ? "1" : "0",
                                   bf::csv::format_double(r.value),
                                   bf::csv::format_double(r.threshold), r.detail});
            }
            std::filesystem::create_directories(c.out_dir);
            t.write(c.out_dir + "/validate_report.csv");
            std::cout << (all_pass ? "all checks passed" : "FAILURES present")
                      << "\n";
            return all_pass ? 0 : 1;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
