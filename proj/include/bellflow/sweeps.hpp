// Batch sweep drivers behind the CLI: swap entanglement surfaces, mechanical
// squeezing versus cooperativity, steady-state teleportation studies, and
// single-trajectory runs with CSV/SVG emission.

#pragma once

#include "bellflow/csv.hpp"
#include "bellflow/protocols.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bellflow::sweeps {

std::vector<double> linspace(double lo, double hi, int n);
std::vector<double> logspace(double lo, double hi, int n);

// --------------------------- swap sweep --------------------------------------

struct SwapSweepConfig {
    std::vector<double> z_grid;
    std::vector<double> eta_grid;
    bool optimize = true;
    int workers = 0;
    protocols::GainOptConfig opt;
};

struct SwapCell {
    double z, eta;
    double gain_plus, gain_minus;
    double log_negativity;
    double fidelity_dark;
    int kernel_dim;
};

struct SwapSweepResult {
    std::vector<SwapCell> formula;    // formula gains at each (z, eta)
    std::vector<SwapCell> optimized;  // gain-optimized cells (if requested)
};

SwapSweepResult run_swap_sweep(const SwapSweepConfig& cfg);

void write_swap_sweep(const SwapSweepResult& res, const SwapSweepConfig& cfg,
                      const std::string& out_dir,
                      const std::vector<std::string>& echo);

// --------------------------- optomechanics sweep ----------------------------

struct OMSweepConfig {
    std::vector<double> cooperativity_grid;
    std::vector<double> nbar_grid;
    std::vector<double> kappa_over_omega_grid;
    double squeeze_db = -6.0;
    double squeeze_phase = 0.0;  // arg M override
    double gamma = 1e-6;
    int workers = 0;
};

struct OMCell {
    double cooperativity, nbar, kappa_over_omega;
    double zeta_db;        // NaN when no steady state exists
    double gamma_plus, gamma_minus, epsilon;
    std::string reason;    // non-empty for NaN rows
};

struct OMSweepResult {
    std::vector<OMCell> cells;
    double c_crit;
    double input_db;
};

OMSweepResult run_om_sweep(const OMSweepConfig& cfg);

void write_om_sweep(const OMSweepResult& res, const OMSweepConfig& cfg,
                    const std::string& out_dir,
                    const std::vector<std::string>& echo);

/// Bisection for the zeta = 0 cooperativity at fixed bath/sideband settings.
double om_zeta_crossing(double nbar, double kappa_over_omega, double squeeze_db,
                        double gamma, double c_lo, double c_hi);

// --------------------------- teleport study ---------------------------------

struct TeleportStudyConfig {
    std::vector<double> db_grid;
    double eta = 1.0;
    double squeeze_phase = 0.0;
    Index fock_dim = 30;
};

struct TeleportRow {
    double db, N;
    double purity, fidelity_vacuum;
    double min_variance, target_min_variance;
    double jump_rate, expected_rate;
    bool jump_match;
    int kernel_dim;
};

std::vector<TeleportRow> run_teleport_study(const TeleportStudyConfig& cfg);

void write_teleport_study(const std::vector<TeleportRow>& rows,
                          const TeleportStudyConfig& cfg,
                          const std::string& out_dir,
                          const std::vector<std::string>& echo);

// --------------------------- trajectory runs --------------------------------

struct TrajectoryRunConfig {
    std::string protocol = "swap";   // swap | teleport | om
    bool feedback = true;
    double z = 0.5;
    double eta = 1.0;
    double squeeze_db = 0.0;
    double squeeze_phase = 0.0;
    Index fock_dim = 20;
    double om_cooperativity = 5.0;
    double om_nbar = 0.0;
    double om_kappa_over_omega = 1.0;
    double om_gamma = 0.05;
    sme::TrajectoryConfig traj{1e-3, 1000, 1, 10};
};

struct TrajectoryRunOutput {
    csv::Table currents;
    csv::Table observables;
    long psd_projections = 0;
};

TrajectoryRunOutput run_trajectory_protocol(const TrajectoryRunConfig& cfg,
                                            const std::vector<std::string>& echo);

}  // namespace bellflow::sweeps
