// Ito-form stochastic master equation integration with correlated homodyne
// records, operational measurement-then-feedback stepping, and seeded
// trajectory ensembles.

#pragma once

#include "bellflow/master.hpp"
#include "bellflow/noise.hpp"
#include "bellflow/types.hpp"

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace bellflow::sme {

/// One homodyne channel: `meas` enters the state update through H[meas],
/// `signal` (Hermitian) is the deterministic part of the photocurrent.
struct MeasurementChannel {
    Operator meas;
    Operator signal;
};

/// Conditional-evolution model. `deterministic` holds the full unconditional
/// generator terms (Hamiltonian plus all dissipators); the two channels carry
/// their prefactors (including sqrt(eta/2) and the EPR coefficients) folded
/// in. `cov` is the Wiener covariance of (dW+, dW-).
struct SMEModel {
    SpaceLayout layout;
    std::vector<master::GeneratorTerm> deterministic;
    MeasurementChannel plus;
    MeasurementChannel minus;
    noise::NoiseCov cov;
    double efficiency = 1.0;
};

struct FeedbackOps {
    Operator f_plus;
    Operator f_minus;
};

struct TrajectoryConfig {
    double dt = 1e-3;
    long n_steps = 0;
    std::uint64_t seed = 0;
    long record_stride = 1;  // must divide n_steps
};

struct PhotocurrentRecord {
    std::vector<double> times;
    std::vector<double> i_plus;
    std::vector<double> i_minus;
};

struct Trajectory {
    std::vector<double> times;       // snapshot times (stride boundaries)
    std::vector<DensityOp> states;
    PhotocurrentRecord record;       // one sample per step
    TrajectoryConfig config;
    long psd_projections = 0;        // positivity-breach events
};

/// Euler-Maruyama step of the normalized SME; trace renormalized, PSD
/// projection on tolerance breach (counted in `projections` when given).
DensityOp step_conditional(const SMEModel& model, const DensityOp& rho,
                           std::pair<double, double> dw, double dt,
                           long* projections = nullptr);

/// I± = tr(rho signal±) + dW±/dt, with the same increments as the state step.
std::pair<double, double> photocurrent_sample(const SMEModel& model,
                                              const DensityOp& rho,
                                              std::pair<double, double> dw,
                                              double dt);

/// Measurement step followed by the feedback kick
/// exp(-i (F+ I+ + F- I-) dt / sqrt(2 eta)) built from the same increments.
DensityOp step_with_feedback(const SMEModel& model, const DensityOp& rho,
                             const FeedbackOps& fb,
                             std::pair<double, double> dw, double dt,
                             long* projections = nullptr);

/// Integrate one seeded trajectory from rho0. Deterministic per
/// (config.seed, stream_index).
Trajectory run_trajectory(const SMEModel& model, const DensityOp& rho0,
                          const std::optional<FeedbackOps>& fb,
                          const TrajectoryConfig& cfg,
                          std::uint64_t stream_index = 0);

/// Independent trajectories farmed over a worker pool, merged by index.
std::vector<Trajectory> run_ensemble(const SMEModel& model, const DensityOp& rho0,
                                     const std::optional<FeedbackOps>& fb,
                                     const TrajectoryConfig& cfg, int n_traj,
                                     int workers);

struct EnsembleAverage {
    std::vector<double> times;
    std::vector<DensityOp> mean;
    std::vector<double> se;  // trace-distance dispersion / sqrt(n)
};

EnsembleAverage ensemble_average(std::span<const Trajectory> trajectories);

/// Worker-count resolution: explicit request > BELLFLOW_WORKERS env >
/// hardware concurrency.
int resolve_workers(int requested = 0);

}  // namespace bellflow::sme
