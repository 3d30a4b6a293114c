#include "bellflow/sme.hpp"

#include "bellflow/qops.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdlib>
#include <thread>

namespace bellflow::sme {

namespace {

constexpr double kPsdTol = -1e-9;

// H[A] rho = A rho + rho A~ - tr(A rho + rho A~) rho
inline void add_h_term(const Matrix& a, const Matrix& rho, double dw, Matrix& out) {
    Matrix m = a * rho + rho * a.adjoint();
    out.noalias() += dw * m;
    out.noalias() -= (dw * m.trace().real()) * rho;
}

Matrix conditional_update(const SMEModel& model, const Matrix& rho,
                          std::pair<double, double> dw, double dt) {
    Matrix next = rho + dt * master::apply_terms(model.deterministic, rho);
    add_h_term(model.plus.meas.mat, rho, dw.first, next);
    add_h_term(model.minus.meas.mat, rho, dw.second, next);
    if (!next.allFinite())
        throw std::runtime_error("step_conditional: non-finite update, reduce dt");
    return next;
}

Matrix normalize_state(Matrix rho, long* projections) {
    rho = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdTol) {
        rho = qops::project_to_psd(rho);
        if (projections) ++(*projections);
    }
    double tr = rho.trace().real();
    if (!(tr > 0))
        throw std::runtime_error("step: state trace collapsed, reduce dt");
    return rho / tr;
}

inline Matrix kick_unitary(const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x);
    Vector phases(x.rows());
    for (Index i = 0; i < x.rows(); ++i)
        phases(i) = std::polar(1.0, -es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

DensityOp step_conditional(const SMEModel& model, const DensityOp& rho,
                           std::pair<double, double> dw, double dt,
                           long* projections) {
    Matrix next = conditional_update(model, rho.mat(), dw, dt);
    return DensityOp(DensityOp::Unchecked{}, model.layout,
                     normalize_state(std::move(next), projections));
}

std::pair<double, double> photocurrent_sample(const SMEModel& model,
                                              const DensityOp& rho,
                                              std::pair<double, double> dw,
                                              double dt) {
    double ip = (rho.mat() * model.plus.signal.mat).trace().real() + dw.first / dt;
    double im = (rho.mat() * model.minus.signal.mat).trace().real() + dw.second / dt;
    return {ip, im};
}

DensityOp step_with_feedback(const SMEModel& model, const DensityOp& rho,
                             const FeedbackOps& fb,
                             std::pair<double, double> dw, double dt,
                             long* projections) {
    if (!fb.f_plus.is_hermitian(1e-9) || !fb.f_minus.is_hermitian(1e-9))
        throw std::invalid_argument("step_with_feedback: F± must be Hermitian");
    auto [ip, im] = photocurrent_sample(model, rho, dw, dt);
    Matrix next = conditional_update(model, rho.mat(), dw, dt);
    double scale = std::sqrt(1.0 / (2.0 * model.efficiency)) * dt;
    Matrix u = kick_unitary(scale * (ip * fb.f_plus.mat + im * fb.f_minus.mat));
    next = u * next * u.adjoint();
    return DensityOp(DensityOp::Unchecked{}, model.layout,
                     normalize_state(std::move(next), projections));
}

Trajectory run_trajectory(const SMEModel& model, const DensityOp& rho0,
                          const std::optional<FeedbackOps>& fb,
                          const TrajectoryConfig& cfg,
                          std::uint64_t stream_index) {
    if (cfg.dt <= 0) throw std::invalid_argument("run_trajectory: dt must be > 0");
    if (cfg.n_steps < 0) throw std::invalid_argument("run_trajectory: n_steps < 0");
    long stride = cfg.record_stride > 0 ? cfg.record_stride : 1;
    if (cfg.n_steps % stride != 0)
        throw std::invalid_argument("run_trajectory: stride must divide n_steps");

    noise::RngStream rng(cfg.seed, stream_index);
    Trajectory traj;
    traj.config = cfg;
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);

    DensityOp rho = rho0;
    for (long k = 0; k < cfg.n_steps; ++k) {
        auto dw = noise::sample_increments(model.cov, cfg.dt, rng);
        auto [ip, im] = photocurrent_sample(model, rho, dw, cfg.dt);
        traj.record.times.push_back(k * cfg.dt);
        traj.record.i_plus.push_back(ip);
        traj.record.i_minus.push_back(im);
        rho = fb ? step_with_feedback(model, rho, *fb, dw, cfg.dt,
                                      &traj.psd_projections)
                 : step_conditional(model, rho, dw, cfg.dt, &traj.psd_projections);
        if ((k + 1) % stride == 0) {
            traj.times.push_back((k + 1) * cfg.dt);
            traj.states.push_back(rho);
        }
    }
    return traj;
}

std::vector<Trajectory> run_ensemble(const SMEModel& model, const DensityOp& rho0,
                                     const std::optional<FeedbackOps>& fb,
                                     const TrajectoryConfig& cfg, int n_traj,
                                     int workers) {
    workers = resolve_workers(workers);
    std::vector<Trajectory> out(n_traj);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n_traj; i = next.fetch_add(1))
            out[i] = run_trajectory(model, rho0, fb, cfg,
                                    static_cast<std::uint64_t>(i));
    };
    if (workers <= 1 || n_traj <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

EnsembleAverage ensemble_average(std::span<const Trajectory> trajectories) {
    if (trajectories.size() < 2)
        throw std::invalid_argument("ensemble_average: need at least 2 trajectories");
    const auto& first = trajectories.front();
    for (const auto& t : trajectories)
        if (t.times.size() != first.times.size() || t.config.dt != first.config.dt)
            throw std::invalid_argument("ensemble_average: config mismatch");

    EnsembleAverage avg;
    avg.times = first.times;
    const auto n = static_cast<double>(trajectories.size());
    for (std::size_t k = 0; k < first.times.size(); ++k) {
        Matrix acc = Matrix::Zero(first.states[k].mat().rows(),
                                  first.states[k].mat().cols());
        for (const auto& t : trajectories) acc += t.states[k].mat();
        acc /= n;
        double disp = 0.0;
        for (const auto& t : trajectories) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(t.states[k].mat() - acc,
                                                     Eigen::EigenvaluesOnly);
            disp += 0.5 * es.eigenvalues().cwiseAbs().sum();
        }
        avg.se.push_back(disp / n / std::sqrt(n));
        avg.mean.emplace_back(DensityOp::Unchecked{}, first.states[k].layout(),
                              std::move(acc));
    }
    return avg;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BELLFLOW_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace bellflow::sme
