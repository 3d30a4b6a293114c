#include "bellflow/validate.hpp"

#include "bellflow/feedback.hpp"
#include "bellflow/master.hpp"
#include "bellflow/noise.hpp"
#include "bellflow/protocols.hpp"
#include "bellflow/qops.hpp"
#include "bellflow/sme.hpp"
#include "bellflow/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace bellflow::validate {

namespace {

using master::GeneratorTerm;
using noise::RngStream;

Matrix random_density(Index d, RngStream& rng) {
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

Matrix random_matrix(Index d, RngStream& rng) {
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    return g;
}

double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

struct Suite {
    const ValidateOptions& opt;
    std::vector<CheckResult> results;

    void record(const std::string& name, double value, double threshold,
                const std::string& detail = "") {
        double th = threshold * opt.tolerance_scale;
        results.push_back({name, value <= th, value, th, detail});
    }
};

void check_noise_identities(Suite& s) {
    RngStream rng(s.opt.seed, 1001);
    double worst_det = 0, worst_sum = 0;
    for (int k = 0; k < 200; ++k) {
        double N = 3.0 * rng.uniform();
        double phase = 2.0 * M_PI * rng.uniform();
        auto sq = noise::SqueezingSpec::pure(N, phase);
        auto w = noise::noise_covariance(sq);
        worst_det = std::max(worst_det,
                             std::abs(w.w1 * w.w2 - w.w3 * w.w3 - (N + 1.0)));
        worst_sum = std::max(worst_sum, std::abs(w.w1 + w.w2 - 2.0 * (N + 1.0)));
    }
    s.record("noise.purity-identity", worst_det, 1e-10);
    s.record("noise.sum-identity", worst_sum, 1e-12);

    auto c = noise::epr_coeffs(noise::SqueezingSpec::pure(1e-8));
    s.record("noise.vacuum-continuity",
             std::abs(c.mu - 1.0) + std::abs(c.nu - kI), 1e-3);
}

void check_increment_sampler(Suite& s) {
    noise::NoiseCov w{2.0, 2.0, std::sqrt(2.0)};
    RngStream rng(s.opt.seed, 1002);
    const int n = 100000;
    const double dt = 1e-3;
    double s11 = 0, s22 = 0, s12 = 0;
    for (int k = 0; k < n; ++k) {
        auto [a, b] = noise::sample_increments(w, dt, rng);
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
    }
    double e11 = std::abs(s11 / n / dt - w.w1);
    double e22 = std::abs(s22 / n / dt - w.w2);
    double e12 = std::abs(s12 / n / dt - w.w3);
    // 5 standard errors of the sample (co)variances
    double se = 5.0 * w.w1 * std::sqrt(2.0 / n);
    s.record("noise.sampler-moments", std::max({e11, e22, e12}), se);

    RngStream r1(42, 7), r2(42, 7);
    auto p1 = noise::sample_increments(w, dt, r1);
    auto p2 = noise::sample_increments(w, dt, r2);
    s.record("noise.sampler-determinism",
             std::abs(p1.first - p2.first) + std::abs(p1.second - p2.second), 0.0);
}

void check_qops(Suite& s) {
    RngStream rng(s.opt.seed, 1003);
    // compose associativity on a random 3-factor layout
    SpaceLayout lay{2, 3, 2};
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
        Matrix a = random_matrix(2, rng), b = random_matrix(3, rng),
               c = random_matrix(2, rng);
        Matrix lhs = qops::compose(lay, {a, b, c}).mat;
        Matrix rhs = (qops::embed(lay, 0, a) * qops::embed(lay, 1, b) *
                      qops::embed(lay, 2, c)).mat;
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    s.record("qops.compose-associativity", worst, 1e-12);

    // partial transpose is an involution, preserves trace and Hermiticity
    SpaceLayout lay2{2, 3};
    worst = 0;
    double worst_tr = 0;
    for (int k = 0; k < 20; ++k) {
        DensityOp rho(lay2, random_density(6, rng));
        Matrix pt = qops::partial_transpose(rho, 1);
        DensityOp ptd(DensityOp::Unchecked{}, lay2, pt);
        Matrix ptpt = qops::partial_transpose(ptd, 1);
        worst = std::max(worst, (ptpt - rho.mat()).cwiseAbs().maxCoeff());
        worst_tr = std::max(worst_tr, std::abs(pt.trace() - Complex(1.0)));
        worst_tr = std::max(worst_tr, (pt - pt.adjoint()).cwiseAbs().maxCoeff());
    }
    s.record("qops.partial-transpose-involution", worst, 1e-12);
    s.record("qops.partial-transpose-preserves", worst_tr, 1e-12);

    // product states carry no entanglement
    worst = 0;
    SpaceLayout lay3{2, 2};
    for (int k = 0; k < 100; ++k) {
        Matrix ra = random_density(2, rng), rb = random_density(2, rng);
        DensityOp rho(lay3, qops::kron(ra, rb));
        worst = std::max(worst, qops::log_negativity(rho, 1));
    }
    s.record("qops.logneg-product-states", worst, 1e-10);

    // vacuum covariance at several truncations
    worst = 0;
    for (Index d : {2, 5, 30}) {
        auto qc = qops::quadrature_covariance(
            qops::pure_density(qops::fock_ket(d, 0)), 0);
        Eigen::Matrix2d target = 0.5 * Eigen::Matrix2d::Identity();
        worst = std::max(worst, (qc.cov - target).cwiseAbs().maxCoeff());
    }
    s.record("qops.vacuum-covariance", worst, 1e-13);

    // [x, p] = i away from the truncation corner
    Index d = 20;
    Matrix comm = qops::position(d) * qops::momentum(d) -
                  qops::momentum(d) * qops::position(d);
    Matrix dev = comm - kI * Matrix::Identity(d, d);
    dev(d - 1, d - 1) = 0.0;
    s.record("qops.canonical-commutator", dev.cwiseAbs().maxCoeff(), 1e-12);
}

void check_master(Suite& s) {
    RngStream rng(s.opt.seed, 1004);
    SpaceLayout lay{4};
    double worst = 0;
    for (int k = 0; k < 50; ++k) {
        std::vector<GeneratorTerm> terms;
        int nt = 1 + int(rng.uniform() * 3);
        for (int i = 0; i < nt; ++i) {
            Matrix m = random_matrix(4, rng);
            if (rng.uniform() < 0.4) {
                Matrix h = 0.5 * (m + m.adjoint());
                terms.push_back(GeneratorTerm::hamiltonian(Operator(lay, h)));
            } else {
                terms.push_back(GeneratorTerm::dissipator(
                    Operator(lay, m), rng.uniform() * 2.0 - 0.5));
            }
        }
        worst = std::max(worst, master::Liouvillian::build(lay, terms).trace_defect());
    }
    s.record("master.trace-preservation", worst, 1e-10);

    // steady-state residual and positivity for a thermal generator
    Index d = 10;
    SpaceLayout fl{d};
    Matrix c = qops::annihilation(d);
    std::vector<GeneratorTerm> th{
        GeneratorTerm::dissipator(Operator(fl, c), 2.0),
        GeneratorTerm::dissipator(Operator(fl, c.adjoint()), 1.0)};
    auto ss = master::steady_state(master::Liouvillian::build(fl, th));
    s.record("master.steady-state-residual", ss.residual, 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(ss.state.mat(), Eigen::EigenvaluesOnly);
    s.record("master.steady-state-psd", std::max(0.0, -es.eigenvalues().minCoeff()),
             1e-9);

    // dissipator-matrix diagonalization round-trip
    Index fd = 12;
    SpaceLayout fl2{fd};
    master::DissipatorMatrix dm;
    dm.basis = {Operator(fl2, qops::position(fd)), Operator(fl2, qops::momentum(fd))};
    Matrix g = random_matrix(2, rng);
    dm.lambda = g + g.adjoint();  // indefinite Hermitian
    auto channels = master::diagonalize_dissipator(dm);
    std::vector<GeneratorTerm> rebuilt;
    for (const auto& ch : channels)
        rebuilt.push_back(GeneratorTerm::dissipator(ch.jump, ch.rate));
    auto l1 = master::lambda_form_liouvillian(dm);
    auto l2 = master::Liouvillian::build(fl2, rebuilt);
    worst = 0;
    for (int k = 0; k < 20; ++k) {
        Matrix rho = random_density(fd, rng);
        worst = std::max(worst,
                         (l1.apply(rho) - l2.apply(rho)).cwiseAbs().maxCoeff());
    }
    s.record("master.dissipator-roundtrip", worst, 1e-10);

    // RK4 versus exact exponential of the vectorized generator
    std::vector<GeneratorTerm> amp{GeneratorTerm::dissipator(
        Operator(SpaceLayout{2}, qops::sigma_minus()), 1.0)};
    auto liou = master::Liouvillian::build(SpaceLayout{2}, amp);
    Matrix rho0(2, 2);
    rho0 << 0.2, Complex(0.1, 0.05), Complex(0.1, -0.05), 0.8;
    auto evolved = master::evolve_me(liou, DensityOp(SpaceLayout{2}, rho0), 1.0, 1e-3);
    Matrix expL = (liou.matrix() * 1.0).exp();
    Vector v = expL * rho0.reshaped();
    Matrix exact = v.reshaped(2, 2);
    s.record("master.rk4-vs-expm", trace_distance(evolved.mat(), exact), 1e-8);
}

void check_protocols(Suite& s) {
    // dark-state construction across z
    double worst = 0;
    for (double z = 0.1; z < 0.95; z += 0.1) {
        protocols::TlsSwapParams p;
        p.z = z;
        auto m = protocols::tls_swap_model(p);
        const Vector& phi = m.dark_state.amps;
        Matrix jp = (m.s1.mat + m.s2.mat) - kI * m.fb.f_plus.mat;
        Matrix jm = (m.s1.mat - m.s2.mat) - m.fb.f_minus.mat;
        worst = std::max({worst, (m.j1.mat * phi).norm(), (m.j2.mat * phi).norm(),
                          (jp * phi).norm(), (jm * phi).norm(),
                          (protocols::swap_effective_hamiltonian(m) * phi).norm()});
    }
    s.record("protocols.dark-state", worst, 1e-10);

    // swap steady state at z = 0.5
    auto [gp, gm] = protocols::swap_formula_gains(0.5);
    double en = protocols::swap_steady_log_negativity(0.5, gp, gm, 1.0);
    double en_formula = std::log2(2.25 / 1.25);
    s.record("protocols.swap-steady-entanglement", std::abs(en - en_formula), 1e-3);

    // vacuum teleportation fixed point and jump form
    auto sq = noise::SqueezingSpec::vacuum();
    auto model = protocols::bosonic_teleport_model(sq, 20);
    Operator h0(model.s.layout, Matrix::Zero(20, 20));
    auto me = feedback::teleport_feedback_me(h0, model.s, model.fb,
                                             noise::noise_covariance(sq), 1.0);
    auto ss = master::steady_state(me.liou);
    double fid = qops::fidelity_with_pure(ss.state, qops::fock_ket(20, 0));
    s.record("protocols.teleport-vacuum-fixed-point", 1.0 - fid, 1e-8);
    auto rep = feedback::verify_jump_form(
        me.jump_channels, {{1.0, model.expected_jump.direction}}, 1e-8, 1e-8);
    s.record("protocols.teleport-vacuum-jump-form", rep.match ? 0.0 : 1.0, 0.5,
             rep.detail);

    // Gaussian and Fock routes agree
    auto in3 = noise::SqueezingSpec::from_db(-3.0);
    auto p = protocols::OMParams::resolved_sideband(5.0, 1.0, 1.0, in3, 0.05);
    auto gauss = protocols::om_gaussian_steady(p);
    auto fme = protocols::om_feedback_me(p, 24);
    auto fss = master::steady_state(fme.liou);
    auto qc = qops::quadrature_covariance(fss.state, 0);
    s.record("protocols.gaussian-vs-fock",
             (gauss.covariance - qc.cov).cwiseAbs().maxCoeff(), 1e-6);

    // threshold formula and squeezing asymptote
    auto in6 = noise::SqueezingSpec::from_db(-6.0);
    auto p6 = protocols::OMParams::resolved_sideband(1.0, 0.0, 1.0, in6, 1e-6);
    double ccrit = protocols::om_adiabatic_params(p6).c_crit;
    s.record("protocols.c-crit-formula", std::abs(ccrit - 2.6709), 2e-3);
    auto pas = protocols::OMParams::resolved_sideband(1e6, 0.0, 1e-3, in6, 1e-9);
    double zeta = protocols::om_gaussian_steady(pas).zeta_db;
    s.record("protocols.squeezing-asymptote", std::abs(zeta - (-6.0)), 0.1);

    // lossy builder continuous at eta -> 1
    protocols::TlsSwapParams tp;
    tp.z = 0.5;
    auto m = protocols::tls_swap_model(tp);
    Operator hz(m.layout, Matrix::Zero(4, 4));
    auto l1 = feedback::swap_feedback_liouvillian(hz, m.s1, m.s2, m.fb, 1.0);
    auto l2 = feedback::swap_feedback_liouvillian(hz, m.s1, m.s2, m.fb, 0.999);
    double diff = (l1.matrix() - l2.matrix()).cwiseAbs().maxCoeff();
    s.record("protocols.lossy-continuity", diff, 0.01);
}

void check_sme_ensemble(Suite& s) {
    // squeezed-input teleport model on a TLS, with feedback; ensemble mean
    // must match the unconditional feedback generator
    auto sq = noise::SqueezingSpec{1.0, Complex(0.0, std::sqrt(2.0))};
    SpaceLayout lay{2};
    Operator sm(lay, qops::sigma_minus());
    Operator h0(lay, Matrix::Zero(2, 2));
    double eta = 0.8;
    auto model = protocols::teleport_sme_model(h0, sm, sq, eta);
    if (s.opt.inject_nu_sign_flip) {
        model.minus.meas = -1.0 * model.minus.meas;
    }
    feedback::FeedbackSpec fb{Operator(lay, 0.7 * qops::sigma_y()),
                              Operator(lay, 0.5 * qops::sigma_x())};
    auto me = feedback::teleport_feedback_me(h0, sm, fb,
                                             noise::noise_covariance(sq), eta);

    Matrix rho0(2, 2);
    rho0 << 0.3, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.7;
    DensityOp rho(lay, rho0);

    sme::TrajectoryConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = 1000;
    cfg.seed = s.opt.seed;
    cfg.record_stride = 1000;
    auto trajs = sme::run_ensemble(model, rho, sme::FeedbackOps{fb.f_plus, fb.f_minus},
                                   cfg, s.opt.sme_trajectories, s.opt.workers);
    auto avg = sme::ensemble_average(trajs);
    auto expected = master::evolve_me(me.liou, rho, 1.0, 1e-3);
    double dist = trace_distance(avg.mean.back().mat(), expected.mat());
    double bound = std::max(3.0 * avg.se.back(), 0.02);
    std::ostringstream det;
    det << "dist = " << dist << ", 3*SE = " << 3.0 * avg.se.back();
    s.record("sme.feedback-ensemble-mean", dist, bound, det.str());
}

}  // namespace

std::vector<CheckResult> run_all(const ValidateOptions& opt) {
    Suite s{opt, {}};
    check_noise_identities(s);
    check_increment_sampler(s);
    check_qops(s);
    check_master(s);
    check_protocols(s);
    check_sme_ensemble(s);
    return std::move(s.results);
}

}  // namespace bellflow::validate
